//! Randomized certification that a candidate surface satisfies the axioms
//! characterizing the Bellman function (obstacle equalities, jump
//! inequality, concavity, the three-variable main inequality,
//! homogeneity), plus the sharp-constant, envelope, operator-identity and
//! r-ordering checks built on top.
//!
//! Every check is deterministic: sample `i` of a property is drawn from a
//! ChaCha stream keyed by `(rng_seed, property, i)`, so reports are
//! bit-identical across runs and thread counts, and any reported witness
//! can be regenerated standalone from its index.
//!
//! A failing check is a report, not an error: refutation of a broken
//! candidate is an expected outcome.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::closedform::{
    self, bellman_m, boundary_f_unchecked, envelope_phi, limit_surface_inf, limit_surface_zero,
    omega_seq_unchecked, phi, weak_norm_constant,
};
use crate::dyadic::{CarlesonSequence, StepFunction};
use crate::operators::{apply_power_mean, apply_sparse_power, level_set_fraction, weak_quotient};

/// Default tolerance for checks whose signature carries none.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Deterministic sampling plan for a property run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSpec {
    pub sample_count: usize,
    pub rng_seed: u64,
    pub tolerance: f64,
    pub omega_max: f64,
}

impl SampleSpec {
    pub fn new(sample_count: usize, rng_seed: u64, tolerance: f64, omega_max: f64) -> Self {
        assert!(sample_count > 0, "sample_count must be positive");
        assert!(tolerance > 0.0, "tolerance must be positive");
        assert!(omega_max > 2.0, "omega_max must exceed the A-range bound 2");
        SampleSpec {
            sample_count,
            rng_seed,
            tolerance,
            omega_max,
        }
    }
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            sample_count: 100_000,
            rng_seed: 7,
            tolerance: DEFAULT_TOLERANCE,
            omega_max: 8.0,
        }
    }
}

/// Outcome of one property check. `passed ⟺ max_violation ≤ tolerance`
/// for the tolerance the check ran with; `witness` is the worst input
/// tuple (encoding documented per property).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property: String,
    pub samples: usize,
    pub max_violation: f64,
    pub witness: Vec<f64>,
    pub passed: bool,
}

/// A candidate two-variable surface `M(ω, A)` on `[0,∞] × [0,2]`.
pub type Surface<'a> = &'a (dyn Fn(f64, f64) -> f64 + Sync);

/// Built-in candidate surfaces for the verification CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Candidate {
    /// The closed-form Bellman surface.
    ClosedForm,
    /// `min(1, A, ω)`: satisfies obstacle and concavity but fails the
    /// jump inequality near (1, 1) — a known-broken mutant.
    MutantMinSurface,
    /// Constant 1: dominates everything, passes all checks trivially.
    ConstOne,
}

impl Candidate {
    pub fn surface(&self, r: f64) -> Box<dyn Fn(f64, f64) -> f64 + Sync> {
        match self {
            Candidate::ClosedForm => {
                Box::new(move |omega, a| bellman_m(r, omega, a).expect("sample in domain"))
            }
            Candidate::MutantMinSurface => Box::new(limit_surface_inf),
            Candidate::ConstOne => Box::new(|_, _| 1.0),
        }
    }
}

impl std::str::FromStr for Candidate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "closedform" => Ok(Candidate::ClosedForm),
            "mutant-minsurface" => Ok(Candidate::MutantMinSurface),
            "const-one" => Ok(Candidate::ConstOne),
            other => Err(format!(
                "unknown candidate {other:?} (expected closedform, mutant-minsurface, const-one)"
            )),
        }
    }
}

// Stream salts keying the per-property sample streams.
const SALT_OBSTACLE: u64 = 0x6f62;
const SALT_JUMP: u64 = 0x6a75;
const SALT_CONCAVITY: u64 = 0x636f;
const SALT_MAIN: u64 = 0x6d69;
const SALT_HOMOGENEITY: u64 = 0x686f;
const SALT_ENVELOPE: u64 = 0x656e;
const SALT_OPERATORS: u64 = 0x6f70;
const SALT_ORDERING: u64 = 0x726f;

fn rng_for(seed: u64, salt: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (salt << 32));
    rng.set_stream(index as u64);
    rng
}

/// ω distribution: half log-uniform on [1e-6, omega_max] (to reach the
/// small-ω triangles), half uniform on [0, 2] (the kinked band).
fn sample_omega<R: Rng>(rng: &mut R, omega_max: f64) -> f64 {
    if rng.gen_bool(0.5) {
        let (lo, hi) = ((1e-6f64).ln(), omega_max.ln());
        (lo + (hi - lo) * rng.gen::<f64>()).exp()
    } else {
        rng.gen_range(0.0..2.0)
    }
}

/// λ mixture for the main inequality: a quarter nonpositive (obstacle
/// interplay), the rest log-uniform positive.
fn sample_lambda<R: Rng>(rng: &mut R) -> f64 {
    if rng.gen_bool(0.25) {
        -rng.gen_range(0.0..2.0)
    } else {
        let (lo, hi) = ((1e-4f64).ln(), (10f64).ln());
        (lo + (hi - lo) * rng.gen::<f64>()).exp()
    }
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (lo.ln() + (hi.ln() - lo.ln()) * rng.gen::<f64>()).exp()
}

/// Lift a two-variable candidate to `B(x, A, λ)` via obstacle + homogeneity.
fn lift<'a>(candidate: Surface<'a>, r: f64) -> impl Fn(f64, f64, f64) -> f64 + Sync + 'a {
    move |x: f64, a: f64, lambda: f64| {
        if lambda <= 0.0 {
            return 1.0;
        }
        let omega = if x == 0.0 {
            0.0
        } else {
            x * lambda.powf(-1.0 / r)
        };
        candidate(omega, a)
    }
}

/// Runs indices `0..samples` in parallel and reduces to the worst
/// violation with a deterministic smallest-index tie-break.
fn run_property(
    name: &str,
    samples: usize,
    tolerance: f64,
    violation_at: impl Fn(usize) -> f64 + Sync,
    witness_at: impl Fn(usize) -> Vec<f64>,
) -> PropertyReport {
    let (max_violation, index) = (0..samples)
        .into_par_iter()
        .map(|i| (violation_at(i), i))
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    let witness = if index == usize::MAX {
        Vec::new()
    } else {
        witness_at(index)
    };
    PropertyReport {
        property: name.to_string(),
        samples,
        max_violation,
        witness,
        passed: max_violation <= tolerance,
    }
}

/// The five supersolution axioms checked against `candidate` at parameter
/// `r`: obstacle equalities, jump inequality, midpoint concavity, the
/// lifted three-variable main inequality (γ = 0 and γ = 1), and
/// homogeneity. Witness encodings: obstacle `[ω, A]`; jump `[ω, A]`;
/// concavity `[ω1, A1, ω2, A2]`; main inequality `[x1, A1, x2, A2, λ, γ]`;
/// homogeneity `[x, A, λ, c]`.
pub fn check_supersolution_suite(
    r: f64,
    spec: &SampleSpec,
    candidate: Surface<'_>,
) -> Vec<PropertyReport> {
    let w0 = omega_seq_unchecked(r, 0);
    let seed = spec.rng_seed;
    let n = spec.sample_count;
    // keep x^r finite for every sampled x
    let x_cap = spec.omega_max.min(1e250f64.powf(1.0 / r));

    let obstacle_point = |i: usize| -> (f64, f64) {
        let mut rng = rng_for(seed, SALT_OBSTACLE, i);
        let t: f64 = if i < 2 { 0.0 } else { rng.gen() };
        if i.is_multiple_of(2) {
            (1.0 + t * (spec.omega_max - 1.0), 1.0)
        } else {
            (w0 + t * (spec.omega_max - w0), 2.0)
        }
    };
    let obstacle = run_property(
        "obstacle",
        n,
        spec.tolerance,
        |i| {
            let (omega, a) = obstacle_point(i);
            (candidate(omega, a) - 1.0).abs()
        },
        |i| {
            let (omega, a) = obstacle_point(i);
            vec![omega, a]
        },
    );

    let jump_point = |i: usize| -> (f64, f64) {
        let mut rng = rng_for(seed, SALT_JUMP, i);
        let omega = sample_omega(&mut rng, spec.omega_max);
        let a = rng.gen_range(0.0..=1.0);
        (omega, a)
    };
    let jump = run_property(
        "jump",
        n,
        spec.tolerance,
        |i| {
            let (omega, a) = jump_point(i);
            let jumped = phi(r, omega).expect("ω ≥ 0");
            candidate(omega, a) - candidate(jumped, a + 1.0)
        },
        |i| {
            let (omega, a) = jump_point(i);
            vec![omega, a]
        },
    );

    let concavity_point = |i: usize| -> [f64; 4] {
        let mut rng = rng_for(seed, SALT_CONCAVITY, i);
        [
            sample_omega(&mut rng, spec.omega_max),
            rng.gen_range(0.0..=2.0),
            sample_omega(&mut rng, spec.omega_max),
            rng.gen_range(0.0..=2.0),
        ]
    };
    let concavity = run_property(
        "concavity",
        n,
        spec.tolerance,
        |i| {
            let [w1, a1, w2, a2] = concavity_point(i);
            0.5 * (candidate(w1, a1) + candidate(w2, a2))
                - candidate(0.5 * (w1 + w2), 0.5 * (a1 + a2))
        },
        |i| concavity_point(i).to_vec(),
    );

    let lifted = lift(candidate, r);
    let main_point = |i: usize| -> [f64; 5] {
        let mut rng = rng_for(seed, SALT_MAIN, i);
        [
            sample_omega(&mut rng, spec.omega_max).min(x_cap),
            rng.gen_range(0.0..=2.0),
            sample_omega(&mut rng, spec.omega_max).min(x_cap),
            rng.gen_range(0.0..=2.0),
            sample_lambda(&mut rng),
        ]
    };
    let main_inequality = run_property(
        "main_inequality",
        n,
        spec.tolerance,
        |i| {
            let [x1, a1, x2, a2, lambda] = main_point(i);
            let (x, a) = (0.5 * (x1 + x2), 0.5 * (a1 + a2));
            let rhs = 0.5 * (lifted(x1, a1, lambda) + lifted(x2, a2, lambda));
            let mut v = rhs - lifted(x, a, lambda);
            if a + 1.0 <= 2.0 {
                v = v.max(rhs - lifted(x, a + 1.0, lambda + x.powf(r)));
            }
            v
        },
        |i| {
            let p = main_point(i);
            let a = 0.5 * (p[1] + p[3]);
            let gamma = if a + 1.0 <= 2.0 { 1.0 } else { 0.0 };
            vec![p[0], p[1], p[2], p[3], p[4], gamma]
        },
    );

    let homogeneity_point = |i: usize| -> [f64; 4] {
        let mut rng = rng_for(seed, SALT_HOMOGENEITY, i);
        let x = sample_omega(&mut rng, spec.omega_max).min(x_cap);
        let a = rng.gen_range(0.0..=2.0);
        let lambda = log_uniform(&mut rng, 1e-3, 1e3);
        // keep c^r within range for any r
        let span = (100f64.ln()).min(300.0 / r);
        let c = (span * rng.gen_range(-1.0..=1.0)).exp();
        [x, a, lambda, c]
    };
    let homogeneity = run_property(
        "homogeneity",
        n,
        spec.tolerance,
        |i| {
            let [x, a, lambda, c] = homogeneity_point(i);
            (lifted(x, a, lambda) - lifted(c * x, a, c.powf(r) * lambda)).abs()
        },
        |i| homogeneity_point(i).to_vec(),
    );

    vec![obstacle, jump, concavity, main_inequality, homogeneity]
}

/// Sharp-constant check: the ratio sequence `2^{-n}/ω_n(r)` must increase
/// strictly to `C(r)` (reaching it to within `2 C(r) 2^{-n_max r}` by
/// `n_max`), and `M(ω, 2)/ω` must stay below `C(r)` on a fine ω-grid.
/// Witness: `[kind, n-or-ω]` with kind 0 = monotonicity, 1 = bound,
/// 2 = closeness, 3 = grid sup.
pub fn check_norm_constant(r: f64, n_max: u32) -> PropertyReport {
    assert!(n_max >= 2, "n_max must be at least 2");
    let c = weak_norm_constant(r).expect("r > 0");
    let ratio = |n: u32| 2f64.powi(-(n as i32)) / omega_seq_unchecked(r, n);

    let grid: Vec<f64> = {
        let mut g: Vec<f64> = (0..=600)
            .map(|i| (1e-9f64.ln() + (2f64.ln() - 1e-9f64.ln()) * i as f64 / 600.0).exp())
            .collect();
        g.extend((1..=1400).map(|i| 2.0 * i as f64 / 1400.0));
        g
    };

    let n_ratios = n_max as usize + 1;
    let total = n_ratios + (n_max as usize) + 1 + grid.len();
    let violation_at = |i: usize| -> f64 {
        if i < n_ratios {
            // bounded by C(r)
            ratio(i as u32) - c
        } else if i < n_ratios + n_max as usize {
            // strictly increasing
            let n = (i - n_ratios) as u32;
            ratio(n) - ratio(n + 1)
        } else if i == n_ratios + n_max as usize {
            // within 2 C 2^{-n_max r} of C at n_max
            (c - ratio(n_max)) - 2.0 * c * 2f64.powf(-(n_max as f64) * r)
        } else {
            let omega = grid[i - n_ratios - n_max as usize - 1];
            bellman_m(r, omega, 2.0).expect("in domain") / omega - c
        }
    };
    run_property(
        "norm_constant",
        total,
        DEFAULT_TOLERANCE,
        violation_at,
        |i| {
            if i < n_ratios {
                vec![1.0, i as f64]
            } else if i < n_ratios + n_max as usize {
                vec![0.0, (i - n_ratios) as f64]
            } else if i == n_ratios + n_max as usize {
                vec![2.0, n_max as f64]
            } else {
                vec![3.0, grid[i - n_ratios - n_max as usize - 1]]
            }
        },
    )
}

/// Envelope check: `Φ_r ≥ M_r` on random points of `{ω ≤ A ≤ 2}` plus
/// equality (within tolerance) at deterministic points of the seams
/// `[O G_0]` and `[O F_n]`, n ≤ 8. Witness: `[ω, A]`.
pub fn check_envelope(r: f64, spec: &SampleSpec) -> PropertyReport {
    let mut seam_points: Vec<(f64, f64)> = Vec::new();
    for i in 1..=19 {
        let t = i as f64 / 20.0;
        seam_points.push((t, t)); // [O G_0]
    }
    for n in 0..=8u32 {
        let w_n = omega_seq_unchecked(r, n);
        for t in [0.25, 0.5, 0.75, 1.0] {
            seam_points.push((t * w_n, 2.0 * t)); // [O F_n]
        }
    }

    let random_point = |i: usize| -> (f64, f64) {
        let mut rng = rng_for(spec.rng_seed, SALT_ENVELOPE, i);
        let a = rng.gen_range(0.0..=2.0);
        let omega = a * rng.gen::<f64>();
        (omega, a)
    };

    let total = spec.sample_count + seam_points.len();
    run_property(
        "envelope",
        total,
        spec.tolerance,
        |i| {
            if i < spec.sample_count {
                let (omega, a) = random_point(i);
                bellman_m(r, omega, a).expect("in domain")
                    - envelope_phi(r, omega, a).expect("ω ≤ A")
            } else {
                let (omega, a) = seam_points[i - spec.sample_count];
                (bellman_m(r, omega, a).expect("in domain")
                    - envelope_phi(r, omega, a).expect("ω ≤ A"))
                .abs()
            }
        },
        |i| {
            let (omega, a) = if i < spec.sample_count {
                random_point(i)
            } else {
                seam_points[i - spec.sample_count]
            };
            vec![omega, a]
        },
    )
}

/// Operator-identity check on random `(α, f, p)` triples at the given
/// depth: the Hölder chain `A_{α,p} f ≤ (A_{α,1} f^p)^{1/p} ≤ Q_{α,p} f`
/// leafwise, the reduction `Q_{α,p} f = A^{1/p}-power form of f^p`,
/// operator homogeneity (relative), and the weak-quotient bounds for both
/// operator families. Witness: `[sample, p, kind]`.
pub fn check_operator_identities(spec: &SampleSpec, depth: u32) -> PropertyReport {
    assert!(
        (1..=12).contains(&depth),
        "depth must be in 1..=12 (cost 2^N)"
    );

    let sample = |i: usize| -> (CarlesonSequence, StepFunction, f64) {
        let mut rng = rng_for(spec.rng_seed, SALT_OPERATORS, i);
        let seq = CarlesonSequence::random(depth, 0.5, &mut rng);
        let values = (0..1usize << depth)
            .map(|_| {
                if rng.gen_bool(0.2) {
                    0.0
                } else {
                    rng.gen_range(0.0..4.0)
                }
            })
            .collect();
        let f = StepFunction::new(depth, values).expect("nonnegative finite leaves");
        let p = rng.gen_range(1.0..=4.0);
        (seq, f, p)
    };

    let violation_parts = |i: usize| -> [f64; 4] {
        let (seq, f, p) = sample(i);
        let mut rng = rng_for(spec.rng_seed, SALT_OPERATORS ^ 0xff, i);

        let f_pow = f.map(|v| v.powf(p)).expect("valid");
        let a_p = apply_sparse_power(&seq, &f, p).expect("valid").root(p);
        let mid_pow = apply_sparse_power(&seq, &f_pow, 1.0).expect("valid");
        let q = apply_power_mean(&seq, &f, p).expect("valid");
        let reduction = apply_sparse_power(&seq, &f_pow, 1.0 / p).expect("valid");

        let mut chain: f64 = f64::NEG_INFINITY;
        let mut ident: f64 = f64::NEG_INFINITY;
        for (((ap, mp), qv), red) in a_p
            .values()
            .iter()
            .zip(mid_pow.values())
            .zip(q.values())
            .zip(reduction.values())
        {
            let mid = mp.powf(1.0 / p);
            chain = chain.max(ap - mid).max(mid - qv);
            ident = ident.max((qv - red).abs());
        }

        // homogeneity, relative to output scale
        let c = log_uniform(&mut rng, 0.1, 10.0);
        let r2 = log_uniform(&mut rng, 0.3, 4.0);
        let scaled_f = f.map(|v| c * v).expect("valid");
        let lhs = apply_sparse_power(&seq, &scaled_f, r2).expect("valid");
        let rhs = apply_sparse_power(&seq, &f, r2).expect("valid");
        let factor = c.powf(r2);
        let mut homog: f64 = f64::NEG_INFINITY;
        for (l, rv) in lhs.values().iter().zip(rhs.values()) {
            let scaled = factor * rv;
            homog = homog.max((l - scaled).abs() / scaled.abs().max(1.0));
        }

        // weak-quotient bounds for A_{α,r} and Q_{α,p}
        let mut quotient: f64 = f64::NEG_INFINITY;
        if f.mean() > 0.0 {
            let out = apply_sparse_power(&seq, &f, r2).expect("valid");
            let lambda = pick_level(&mut rng, out.values());
            if lambda > 0.0 {
                let wq = weak_quotient(&seq, &f, r2, lambda).expect("positive mean");
                quotient = wq - weak_norm_constant(r2).expect("r > 0");
            }
            let qout = apply_power_mean(&seq, &f, p).expect("valid");
            let lambda_q = pick_level(&mut rng, qout.values());
            if lambda_q > 0.0 {
                let frac = level_set_fraction(&qout, lambda_q);
                let mean_p = f_pow.mean();
                if mean_p > 0.0 {
                    let wq = (lambda_q.powf(p) * frac / mean_p).powf(1.0 / p);
                    quotient =
                        quotient.max(wq - closedform::power_mean_constant(p).expect("p ≥ 1"));
                }
            }
        }
        [chain, ident, homog, quotient]
    };

    run_property(
        "operator_identities",
        spec.sample_count,
        spec.tolerance,
        |i| {
            let parts = violation_parts(i);
            parts.into_iter().fold(f64::NEG_INFINITY, f64::max)
        },
        |i| {
            let (_, _, p) = sample(i);
            let parts = violation_parts(i);
            let kind = parts
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).expect("violations are not NaN"))
                .map(|(k, _)| k)
                .unwrap_or(0);
            vec![i as f64, p, kind as f64]
        },
    )
}

/// Half the levels land exactly on an output value to stress the closed
/// level-set inequality.
fn pick_level<R: Rng>(rng: &mut R, values: &[f64]) -> f64 {
    if rng.gen_bool(0.5) {
        values[rng.gen_range(0..values.len())]
    } else {
        log_uniform(rng, 1e-3, 1e3)
    }
}

/// Accordion check: `min(1, A, ω) ≤ M_r ≤ min(1, A, (ω+A)/2)` for every
/// `r` in the grid, and `M_r` at `r = 10^{∓3}` stays within 0.05 of the
/// corresponding limit surface away from the kink lines.
/// Witness: `[r, ω, A, kind]` with kind 0 = below inf-surface,
/// 1 = above sup-surface, 2 = limit proximity.
pub fn check_r_ordering(spec: &SampleSpec, r_grid: &[f64]) -> PropertyReport {
    assert!(
        !r_grid.is_empty() && r_grid.iter().all(|&r| r > 0.0),
        "r_grid must be positive"
    );
    const KINK_MARGIN: f64 = 0.1;
    const LIMIT_SLACK: f64 = 0.05;

    let point = |i: usize| -> (f64, f64) {
        let mut rng = rng_for(spec.rng_seed, SALT_ORDERING, i);
        (
            sample_omega(&mut rng, spec.omega_max),
            rng.gen_range(0.0..=2.0),
        )
    };

    let eval = |i: usize| -> (f64, usize, f64) {
        let (omega, a) = point(i);
        let lo = limit_surface_inf(omega, a);
        let hi = limit_surface_zero(omega, a);
        let mut worst = f64::NEG_INFINITY;
        let mut kind = 0usize;
        let mut worst_r = r_grid[0];
        for &r in r_grid {
            let m = bellman_m(r, omega, a).expect("in domain");
            if lo - m > worst {
                worst = lo - m;
                kind = 0;
                worst_r = r;
            }
            if m - hi > worst {
                worst = m - hi;
                kind = 1;
                worst_r = r;
            }
        }
        // proximity to the limit surfaces away from their kink lines
        let dist_inf = (a - 1.0)
            .abs()
            .min((omega - 1.0).abs())
            .min((a - omega).abs());
        if dist_inf > KINK_MARGIN {
            let m = bellman_m(1e3, omega, a).expect("in domain");
            let v = (m - lo).abs() - LIMIT_SLACK;
            if v > worst {
                worst = v;
                kind = 2;
                worst_r = 1e3;
            }
        }
        let dist_zero = (a - 1.0)
            .abs()
            .min((omega + a - 2.0).abs() * 0.5)
            .min((a - omega).abs());
        if dist_zero > KINK_MARGIN {
            let m = bellman_m(1e-3, omega, a).expect("in domain");
            let v = (m - hi).abs() - LIMIT_SLACK;
            if v > worst {
                worst = v;
                kind = 2;
                worst_r = 1e-3;
            }
        }
        (worst, kind, worst_r)
    };

    run_property(
        "r_ordering",
        spec.sample_count,
        spec.tolerance,
        |i| eval(i).0,
        |i| {
            let (omega, a) = point(i);
            let (_, kind, r) = eval(i);
            vec![r, omega, a, kind as f64]
        },
    )
}

/// Convenience: `boundary_f` as a surface section, used by callers that
/// want the raw `A = 2` profile without going through `bellman_m`.
pub fn boundary_profile(r: f64, omega: f64) -> f64 {
    boundary_f_unchecked(r, omega)
}
