use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{int, rat, RVector, Rational};
use crate::polyhedron::HPolyhedron;
use crate::walks::{
    check_csimple, circuit_diameter, ser_rational, CSimpleReport, Distance, NonSimpleStep,
    SearchConfig,
};

use super::wedge::wedge;

/// Perturbation entries are multiples of `eps / 2^16`.
pub const PERTURBATION_DENOMINATOR: i64 = 1 << 16;
/// Fresh draws tried by [`perturb`] before giving up.
pub const PERTURBATION_RETRIES: usize = 16;

/// Right-hand side noise: `eps * q / N` with `q` uniform in `(-N, N)`.
pub fn perturbation_vector(rows: usize, eps: &Rational, rng: &mut impl Rng) -> RVector {
    let n = PERTURBATION_DENOMINATOR;
    (0..rows)
        .map(|_| eps * rat(rng.random_range(-n + 1..n), n))
        .collect()
}

/// Mild perturbation `b -> b + p` with `|p_i| < eps`, seeded. The matrix, and
/// hence the circuit set, is unchanged; draws that break validity are retried.
pub fn perturb(p: &HPolyhedron, eps: &Rational, seed: u64) -> Result<HPolyhedron> {
    if eps.is_zero() {
        return Ok(p.clone());
    }
    if eps.is_negative() {
        return Err(Error::Invalid("perturbation size must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..PERTURBATION_RETRIES {
        let noise = perturbation_vector(p.num_rows(), eps, &mut rng);
        let q = p.with_rhs(p.b().add(&noise))?;
        if q.validate().is_valid() {
            return Ok(q);
        }
    }
    Err(Error::PerturbationFailed(PERTURBATION_RETRIES))
}

#[derive(Clone, Debug)]
pub struct CSimpleOptions {
    pub cfg: SearchConfig,
    /// Size of the first perturbation; halved on every further attempt.
    pub eps: Rational,
    pub budget: usize,
    /// Only accept perturbations whose circuit diameter is at least the
    /// original one.
    pub certify_diameter: bool,
}

impl Default for CSimpleOptions {
    fn default() -> Self {
        CSimpleOptions {
            cfg: SearchConfig::default(),
            eps: rat(1, 64),
            budget: 12,
            certify_diameter: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CSimplification {
    #[serde(skip)]
    pub poly: HPolyhedron,
    /// Perturbations tried; 0 when the input was already C-simple.
    pub attempts: usize,
    #[serde(serialize_with = "ser_opt_rational")]
    pub eps: Option<Rational>,
    pub report: CSimpleReport,
    /// Circuit diameters before and after, in certifying mode.
    pub diameters: Option<(Distance, Distance)>,
}

fn ser_opt_rational<S: serde::Serializer>(
    q: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => ser_rational(q, s),
        None => s.serialize_none(),
    }
}

/// Perturbs `p` with shrinking size until the C-simplicity check passes.
pub fn make_csimple(p: &HPolyhedron, opts: &CSimpleOptions, seed: u64) -> Result<CSimplification> {
    make_csimple_with(p, opts, seed, |_| true)
}

/// As [`make_csimple`], additionally requiring `accept` of the result.
pub(crate) fn make_csimple_with(
    p: &HPolyhedron,
    opts: &CSimpleOptions,
    seed: u64,
    accept: impl Fn(&HPolyhedron) -> bool,
) -> Result<CSimplification> {
    let original_diameter = if opts.certify_diameter {
        Some(circuit_diameter(p, &opts.cfg)?.diameter)
    } else {
        None
    };
    let report = check_csimple(p, &opts.cfg)?;
    if report.simple && accept(p) {
        return Ok(CSimplification {
            poly: p.clone(),
            attempts: 0,
            eps: None,
            report,
            diameters: original_diameter.map(|d| (d, d)),
        });
    }
    let mut eps = opts.eps.clone();
    for attempt in 1..=opts.budget {
        let candidate = match perturb(p, &eps, seed.wrapping_add(attempt as u64)) {
            Ok(q) => q,
            Err(Error::PerturbationFailed(_)) => {
                eps /= int(2);
                continue;
            }
            Err(e) => return Err(e),
        };
        if accept(&candidate) {
            let report = check_csimple(&candidate, &opts.cfg)?;
            if report.simple {
                let diameters = match original_diameter {
                    Some(before) => {
                        let after = circuit_diameter(&candidate, &opts.cfg)?.diameter;
                        (after >= before).then_some((before, after))
                    }
                    None => None,
                };
                if !opts.certify_diameter || diameters.is_some() {
                    return Ok(CSimplification {
                        poly: candidate,
                        attempts: attempt,
                        eps: Some(eps),
                        report,
                        diameters,
                    });
                }
            }
        }
        eps /= int(2);
    }
    Err(Error::Exhausted(opts.budget))
}

/// Slopes tried, in order, when looking for a C-simple wedge.
pub fn wedge_slopes() -> Vec<Rational> {
    vec![
        int(1),
        int(2),
        rat(1, 2),
        int(3),
        rat(1, 3),
        rat(3, 2),
        rat(2, 3),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct FacetWedge {
    pub facet: usize,
    /// First slope giving a C-simple (and, recursively, wedge-simple) wedge.
    #[serde(serialize_with = "ser_opt_rational")]
    pub slope: Option<Rational>,
    /// Non-simple step found with the first slope, when no slope worked.
    pub failure: Option<NonSimpleStep>,
    pub children: Vec<FacetWedge>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WedgeSimpleReport {
    pub wedge_simple: bool,
    pub k_depth: usize,
    /// Per-facet evidence, stopping at the first failing facet.
    pub facets: Vec<FacetWedge>,
    /// A perturbation of the input that is wedge-simple, when the input is not.
    pub perturbed: Option<PerturbedWitness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PerturbedWitness {
    pub seed: u64,
    #[serde(serialize_with = "ser_rational")]
    pub eps: Rational,
    pub poly: HPolyhedron,
    pub facets: Vec<FacetWedge>,
}

#[derive(Clone, Debug)]
pub struct WedgeSimpleOptions {
    pub cfg: SearchConfig,
    pub k_depth: usize,
    /// Perturbations of the input tried after a failure.
    pub perturb_retries: usize,
    pub eps: Rational,
}

impl Default for WedgeSimpleOptions {
    fn default() -> Self {
        WedgeSimpleOptions {
            cfg: SearchConfig::default(),
            k_depth: 1,
            perturb_retries: 4,
            eps: rat(1, 64),
        }
    }
}

fn wedge_tree(
    p: &HPolyhedron,
    depth: usize,
    cfg: &SearchConfig,
) -> Result<(bool, Vec<FacetWedge>)> {
    let mut out = Vec::new();
    for facet in 0..p.num_rows() {
        let mut node = FacetWedge {
            facet,
            slope: None,
            failure: None,
            children: Vec::new(),
        };
        for slope in wedge_slopes() {
            let w = wedge(p, facet, &slope)?;
            let report = check_csimple(&w.poly, cfg)?;
            if !report.simple {
                if node.failure.is_none() {
                    node.failure = report.witness;
                }
                continue;
            }
            if depth > 1 {
                let (ok, children) = wedge_tree(&w.poly, depth - 1, cfg)?;
                if !ok {
                    continue;
                }
                node.children = children;
            }
            node.slope = Some(slope);
            node.failure = None;
            break;
        }
        let ok = node.slope.is_some();
        out.push(node);
        if !ok {
            return Ok((false, out));
        }
    }
    Ok((true, out))
}

/// Whether every facet has a C-simple wedge from a fixed slope family,
/// recursively to `k_depth` levels. On failure, perturbations of `p` are
/// tried and a wedge-simple one is reported as a witness.
pub fn check_wedge_simple(
    p: &HPolyhedron,
    opts: &WedgeSimpleOptions,
    seed: u64,
) -> Result<WedgeSimpleReport> {
    let depth = opts.k_depth.max(1);
    let (ok, facets) = wedge_tree(p, depth, &opts.cfg)?;
    let mut perturbed = None;
    if !ok {
        let mut eps = opts.eps.clone();
        for attempt in 1..=opts.perturb_retries {
            let s = seed.wrapping_add(attempt as u64);
            if let Ok(q) = perturb(p, &eps, s) {
                let (ok, facets) = wedge_tree(&q, depth, &opts.cfg)?;
                if ok {
                    perturbed = Some(PerturbedWitness {
                        seed: s,
                        eps,
                        poly: q,
                        facets,
                    });
                    break;
                }
            }
            eps /= int(2);
        }
    }
    Ok(WedgeSimpleReport {
        wedge_simple: ok,
        k_depth: depth,
        facets,
        perturbed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    #[test]
    fn zero_eps_is_identity() {
        let p = instances::pentagon_degenerate();
        assert_eq!(perturb(&p, &int(0), 7).unwrap(), p);
    }

    #[test]
    fn perturbation_is_small_and_keeps_circuits() {
        let p = instances::hexagon();
        let eps = rat(1, 64);
        let q = perturb(&p, &eps, 3).unwrap();
        assert_eq!(q.a(), p.a());
        assert_ne!(q.b(), p.b());
        for (x, y) in q.b().iter().zip(p.b().iter()) {
            assert!((x - y).abs() < eps);
        }
        assert_eq!(q.circuits(), p.circuits());
        assert_eq!(perturb(&p, &eps, 3).unwrap(), q);
        assert_ne!(perturb(&p, &eps, 4).unwrap(), q);
    }

    #[test]
    fn perturbed_pentagon_stays_non_simple() {
        // Reversing a step that leaves two facets of a vertex returns to that
        // vertex and enters both again; no right-hand side change avoids it.
        let p = instances::pentagon_degenerate();
        for seed in 0..5 {
            let q = perturb(&p, &rat(1, 64), seed).unwrap();
            assert_eq!((q.num_rows(), q.dim()), (5, 2));
            assert_eq!(q.circuits(), p.circuits());
            let w = check_csimple(&q, &SearchConfig::default())
                .unwrap()
                .witness
                .unwrap();
            assert_eq!(w.entered.len(), 2);
            assert!(q.is_vertex(&w.to).unwrap());
            let back = crate::walks::max_step(&q, &w.to, &w.circuit.neg())
                .unwrap()
                .unwrap()
                .0;
            assert_eq!(back, w.from);
        }
    }

    #[test]
    fn make_csimple_examples() {
        let sq = instances::square();
        let r = make_csimple(&sq, &CSimpleOptions::default(), 0).unwrap();
        assert_eq!((r.attempts, &r.poly), (0, &sq));

        let opts = CSimpleOptions {
            budget: 4,
            ..Default::default()
        };
        let p = instances::pentagon_degenerate();
        assert_eq!(make_csimple(&p, &opts, 0).unwrap_err(), Error::Exhausted(4));

        // U4 is C-simple for single steps only.
        let u4 = instances::u4();
        let shallow = CSimpleOptions {
            cfg: SearchConfig::with_depth(1),
            ..Default::default()
        };
        let r = make_csimple(&u4, &shallow, 0).unwrap();
        assert_eq!((r.poly.num_rows(), r.poly.dim()), (8, 4));
        assert_eq!(r.poly.circuits(), u4.circuits());
        let deeper = CSimpleOptions {
            cfg: SearchConfig::with_depth(2),
            budget: 2,
            ..Default::default()
        };
        assert_eq!(
            make_csimple(&u4, &deeper, 0).unwrap_err(),
            Error::Exhausted(2)
        );

        let certify = CSimpleOptions {
            certify_diameter: true,
            ..Default::default()
        };
        let r = make_csimple(&instances::cube(3), &certify, 0).unwrap();
        assert_eq!(r.diameters, Some((Distance::Exact(3), Distance::Exact(3))));
    }

    #[test]
    fn wedge_simple_examples() {
        let opts = WedgeSimpleOptions::default();
        let r = check_wedge_simple(&instances::square(), &opts, 0).unwrap();
        assert!(r.wedge_simple);
        assert_eq!(r.facets.len(), 4);
        assert!(r.facets.iter().all(|f| f.slope.is_some()));

        let r = check_wedge_simple(&instances::pentagon_degenerate(), &opts, 0).unwrap();
        assert!(!r.wedge_simple);
        let failing = r.facets.last().unwrap();
        assert!(failing.slope.is_none());
        assert!(failing.failure.as_ref().unwrap().entered.len() >= 2);
        assert!(r.perturbed.is_none());

        let deep = WedgeSimpleOptions {
            k_depth: 2,
            ..Default::default()
        };
        let r = check_wedge_simple(&instances::triangle(), &deep, 0).unwrap();
        assert!(r.wedge_simple);
        assert!(r.facets.iter().all(|f| f.children.len() == 4));
    }
}
