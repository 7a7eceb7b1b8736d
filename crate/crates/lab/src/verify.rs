//! The release checks run by `verify-all`. Each criterion returns its measured
//! quantities alongside the verdict so the matrix can be audited.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use carnot_core::cayley::{
    anisotropy, generator_robustness, growth_fit, word_ball, GeneratingSet, Group, ZGroupElement,
    DEFAULT_BUDGET_BYTES, ROBUSTNESS_TOL,
};
use carnot_core::heisenberg::dense::Dense3;
use carnot_core::heisenberg::{
    commutator, double_commutator_check, exp_map, left_jacobian, log_map, psi, psi_inv, s_embed,
    HeisMatrix, HeisPoint, LieVector,
};
use carnot_core::pansu::{pansu_derivative, BlowupSchedule, Convention, GroupMap, MapKind};
use carnot_core::q_algebra::{
    abe_entropy, bgs_entropy, composition_defect, tsallis_entropy, ProbDist, QParam,
};
use carnot_core::subriemannian::{
    apply, ball_volume_fit, cc_distance, circle_samples, dilate, frame_at, holonomy, BallMetric,
    CcOptions, VolumeOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{LabResult, ModuleContext};
use crate::ledger;

pub const CRITERIA: u32 = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u32,
    pub title: String,
    pub passed: bool,
    pub measurements: Value,
    pub ledger: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    pub volume_samples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: crate::config::DEFAULT_SEED,
            volume_samples: 100_000,
        }
    }
}

/// Wall-clock limit per criterion, in seconds.
pub fn runtime_limit(id: u32) -> Duration {
    let secs = match id {
        1 | 2 | 3 | 5 | 7 | 11 => 1,
        4 => 5,
        6 => 300,
        8 => 120,
        9 | 10 | 12 => 600,
        _ => 600,
    };
    Duration::from_secs(secs)
}

fn rng(seed: u64, id: u32) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(id as u64))
}

fn random_dist(rng: &mut ChaCha8Rng) -> ProbDist {
    let n = rng.gen_range(2..=8);
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    ProbDist::renormalized(w).expect("positive weights normalise")
}

fn random_q(rng: &mut ChaCha8Rng) -> QParam {
    QParam::new(rng.gen_range(0.2..3.0)).expect("finite q")
}

fn random_point(rng: &mut ChaCha8Rng, r: f64) -> HeisPoint {
    HeisPoint::new(rng.gen_range(-r..r), rng.gen_range(-r..r), rng.gen_range(-r..r))
}

fn result(id: u32, title: &str, passed: bool, measurements: Value, ledger: &[&str]) -> CriterionResult {
    CriterionResult {
        id,
        title: title.to_string(),
        passed,
        measurements,
        ledger: ledger.iter().map(|s| s.to_string()).collect(),
    }
}

pub fn q_composition(opts: &VerifyOptions) -> LabResult<CriterionResult> {
    let mut rng = rng(opts.seed, 1);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let (p, r, q) = (random_dist(&mut rng), random_dist(&mut rng), random_q(&mut rng));
        worst = worst.max(composition_defect(&p, &r, q).module("q_algebra")?.abs());
    }
    Ok(result(1, "q-composition identity", worst < 1e-10, json!({"samples": 1000, "max_defect": worst}), &[]))
}

pub fn abe_identity(opts: &VerifyOptions) -> LabResult<CriterionResult> {
    let mut rng = rng(opts.seed, 2);
    let mut worst = 0.0_f64;
    let mut n = 0;
    while n < 1000 {
        let (p, q) = (random_dist(&mut rng), random_q(&mut rng));
        if q.is_bgs_limit() {
            continue;
        }
        let s = tsallis_entropy(&p, q).module("q_algebra")?;
        let a = abe_entropy(&p, q).module("q_algebra")?;
        let rel = if s == 0.0 { (a - s).abs() } else { ((a - s) / s).abs() };
        worst = worst.max(rel);
        n += 1;
    }
    Ok(result(2, "Abe identity", worst < 1e-13, json!({"samples": n, "max_relative_error": worst}), &[]))
}

pub fn bgs_limit(opts: &VerifyOptions) -> LabResult<CriterionResult> {
    let mut rng = rng(opts.seed, 3);
    let h = 1e-4;
    let mut worst_ratio = 0.0_f64;
    let mut ok = true;
    for _ in 0..100 {
        let p = random_dist(&mut rng);
        let s = tsallis_entropy(&p, QParam::new(1.0 + h).unwrap()).module("q_algebra")?;
        let second: f64 = p.weights().iter().map(|w| w * w.ln().powi(2)).sum();
        let bound = 5.0 * h * second.abs();
        let dev = (s - bgs_entropy(&p)).abs();
        ok &= dev <= bound;
        if bound > 0.0 {
            worst_ratio = worst_ratio.max(dev / bound);
        }
    }
    Ok(result(3, "BGS limit", ok, json!({"dists": 100, "h": h, "max_deviation_over_bound": worst_ratio}), &[]))
}

pub fn group_exactness(opts: &VerifyOptions) -> LabResult<CriterionResult> {
    let mut rng = rng(opts.seed, 4);
    let (mut assoc, mut inverse, mut homo, mut explog) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..10_000 {
        let (g, h, k) = (random_point(&mut rng, 2.0), random_point(&mut rng, 2.0), random_point(&mut rng, 2.0));
        assoc = assoc.max(g.exp_mul(&h).exp_mul(&k).max_abs_diff(&g.exp_mul(&h.exp_mul(&k))));
        let (mg, mh, mk) = (psi(&g), psi(&h), psi(&k));
        assoc = assoc.max(mg.mul(&mh).mul(&mk).max_abs_diff(&mg.mul(&mh.mul(&mk))));
        inverse = inverse.max(g.exp_mul(&g.inverse()).max_abs_diff(&HeisPoint::ORIGIN));
        inverse = inverse.max(mg.mul(&mg.inv()).max_abs_diff(&HeisMatrix::IDENTITY));
        homo = homo.max(psi(&g.exp_mul(&h)).max_abs_diff(&mg.mul(&mh)));
        homo = homo.max(psi_inv(&mg).max_abs_diff(&g));
        let v = LieVector { alpha: g.x, beta: g.y, gamma: g.z };
        let back = log_map(&exp_map(&v));
        explog = explog.max((back.alpha - v.alpha).abs().max((back.beta - v.beta).abs()).max((back.gamma - v.gamma).abs()));
        explog = explog.max(exp_map(&log_map(&mg)).max_abs_diff(&mg));
    }
    let mut integer_ok = true;
    let heis = Group::HeisZ;
    for _ in 0..10_000 {
        let mut draw = || HeisMatrix::new(
            rng.gen_range(-1000..=1000) as f64,
            rng.gen_range(-1000..=1000) as f64,
            rng.gen_range(-1000..=1000) as f64,
        );
        let (g1, g2, g3) = (draw(), draw(), draw());
        integer_ok &= double_commutator_check(&g1, &g2, &g3);
        let z = |m: &HeisMatrix| ZGroupElement::new(m.a as i64, m.c as i64, m.b as i64);
        let inner = heis.commutator(&z(&g1), &z(&g2)).module("cayley_growth")?;
        integer_ok &= heis.commutator(&z(&g3), &inner).module("cayley_growth")?.is_identity();
    }
    let tol = 1e-12;
    let passed = assoc < tol && inverse < tol && homo < tol && explog < tol && integer_ok;
    Ok(result(
        4,
        "group exactness",
        passed,
        json!({
            "samples": 10_000,
            "max_associativity_error": assoc,
            "max_inverse_error": inverse,
            "max_homomorphism_error": homo,
            "max_exp_log_error": explog,
            "integer_double_commutators_identity": integer_ok,
        }),
        &[],
    ))
}

pub fn commutator_oracle(opts: &VerifyOptions) -> LabResult<CriterionResult> {
    let mut rng = rng(opts.seed, 5);
    let mut dense_dev = 0.0_f64;
    let mut closed_dev = 0.0_f64;
    let mut claim_gap = 0.0_f64;
    let mut claim_refuted = 0u32;
    for _ in 0..10_000 {
        let (x, y) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let (dx, dy) = (Dense3::from(s_embed(x)), Dense3::from(s_embed(y)));
        let (ix, iy) = (dx.inverse().unwrap(), dy.inverse().unwrap());
        let dense = dx.matmul(&dy).matmul(&ix).matmul(&iy);
        let scale = (1.0 + x.abs() + y.abs()).powi(4);
        dense_dev = dense_dev.max(dense.max_abs_diff(&Dense3::IDENTITY) / scale);
        let c = commutator(&s_embed(x), &s_embed(y));
        closed_dev = closed_dev.max(c.max_abs_diff(&HeisMatrix::IDENTITY) / scale);
        let claimed = -2.0 * x * y;
        let gap = (claimed - dense.0[0][2]).abs();
        claim_gap = claim_gap.max(gap);
        if gap > 1e-9 {
            claim_refuted += 1;
        }
    }
    let passed = dense_dev < 1e-12 && closed_dev < 1e-12 && claim_refuted > 0;
    Ok(result(
        5,
        "commutator oracle",
        passed,
        json!({
            "samples": 10_000,
            "max_dense_deviation_from_identity": dense_dev,
            "max_closed_form_deviation_from_identity": closed_dev,
            "claimed_corner_mismatches": claim_refuted,
            "max_claimed_corner_gap": claim_gap,
        }),
        &[ledger::COMMUTATOR_DIAGONAL],
    ))
}

pub fn left_invariance(opts: &VerifyOptions) -> LabResult<CriterionResult> {
    let mut rng = rng(opts.seed, 6);
    let mut frame_err = 0.0_f64;
    for _ in 0..1000 {
        let (g, p) = (random_point(&mut rng, 3.0), random_point(&mut rng, 3.0));
        let jac = left_jacobian(&g);
        let (here, there) = (frame_at(&p), frame_at(&g.exp_mul(&p)));
        for (v, w) in [(here.x, there.x), (here.y, there.y), (here.z, there.z)] {
            let pushed = apply(&jac, v);
            for i in 0..3 {
                frame_err = frame_err.max((pushed[i] - w[i]).abs());
            }
        }
    }
    let cc = CcOptions::default();
    let mut dist_err = 0.0_f64;
    let mut degraded = 0u32;
    for _ in 0..50 {
        let (a, b, g) = (random_point(&mut rng, 1.0), random_point(&mut rng, 1.0), random_point(&mut rng, 2.0));
        let d0 = cc_distance(&a, &b, &cc).module("subriemannian")?;
        let d1 = cc_distance(&g.exp_mul(&a), &g.exp_mul(&b), &cc).module("subriemannian")?;
        degraded += d0.degraded as u32 + d1.degraded as u32;
        dist_err = dist_err.max((d0.value - d1.value).abs());
    }
    let passed = frame_err < 1e-12 && dist_err < 2.0 * cc.endpoint_tol;
    Ok(result(
        6,
        "left invariance",
        passed,
        json!({
            "frame_points": 1000,
            "max_frame_pushforward_error": frame_err,
            "distance_pairs": 50,
            "max_distance_change": dist_err,
            "degraded_distances": degraded,
        }),
        &[],
    ))
}

pub fn holonomy_area(_opts: &VerifyOptions) -> LabResult<CriterionResult> {
    let circle = holonomy(&circle_samples([0.0, 0.0], 1.0, 10_000, false)).module("subriemannian")?;
    let square = holonomy(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]).module("subriemannian")?;
    let (ce, se) = ((circle - PI).abs(), (square - 1.0).abs());
    Ok(result(
        7,
        "holonomy equals area",
        ce < 1e-5 && se < 1e-9,
        json!({"circle_holonomy": circle, "circle_error": ce, "square_holonomy": square, "square_error": se}),
        &[],
    ))
}

pub fn distance_anchors(_opts: &VerifyOptions) -> LabResult<CriterionResult> {
    let cc = CcOptions::default();
    let planar = cc_distance(&HeisPoint::ORIGIN, &HeisPoint::new(1.0, 0.0, 0.0), &cc).module("subriemannian")?;
    let vertical = cc_distance(&HeisPoint::ORIGIN, &HeisPoint::new(0.0, 0.0, 1.0), &cc).module("subriemannian")?;
    let exact = 2.0 * PI.sqrt();
    let floor = (4.0 * PI).sqrt();
    let passed = (planar.value - 1.0).abs() <= 1e-3
        && (vertical.value - exact).abs() <= 2e-2
        && vertical.lower >= floor * (1.0 - 1e-15)
        && vertical.lower <= vertical.value;
    Ok(result(
        8,
        "CC distance anchors",
        passed,
        json!({
            "planar_value": planar.value,
            "vertical_value": vertical.value,
            "vertical_target": exact,
            "vertical_lower": vertical.lower,
            "vertical_upper": vertical.upper,
            "isoperimetric_floor": floor,
        }),
        &[],
    ))
}

pub fn dilation_homogeneity(opts: &VerifyOptions) -> LabResult<CriterionResult> {
    let mut rng = rng(opts.seed, 9);
    let cc = CcOptions::default();
    let mut worst = 0.0_f64;
    let mut ok = true;
    for _ in 0..20 {
        let (a, b) = (random_point(&mut rng, 1.0), random_point(&mut rng, 1.0));
        let d = cc_distance(&a, &b, &cc).module("subriemannian")?.value;
        for t in [0.5, 2.0, 4.0] {
            let (da, db) = (dilate(&a, t).module("subriemannian")?, dilate(&b, t).module("subriemannian")?);
            let dt = cc_distance(&da, &db, &cc).module("subriemannian")?.value;
            let dev = (dt - t * d).abs();
            ok &= dev <= 3.0 * cc.endpoint_tol * t;
            worst = worst.max(dev / t);
        }
    }
    Ok(result(9, "dilation homogeneity", ok, json!({"pairs": 20, "max_deviation_over_t": worst}), &[]))
}

pub fn volume_scaling(opts: &VerifyOptions) -> LabResult<CriterionResult> {
    let vopts = VolumeOptions {
        samples: opts.volume_samples,
        seed: opts.seed,
        ..VolumeOptions::default()
    };
    let euc = ball_volume_fit(BallMetric::Euclidean, &[1.0, 2.0, 4.0], &vopts).module("subriemannian")?;
    let cc = ball_volume_fit(BallMetric::Cc, &[0.5, 1.0, 2.0], &vopts).module("subriemannian")?;
    let passed = (euc.exponent - 3.0).abs() <= 0.1 && (cc.exponent - 4.0).abs() <= 0.3;
    let degraded: u64 = cc.rows.iter().map(|r| r.membership.degraded).sum();
    let optimized: u64 = cc.rows.iter().map(|r| r.membership.optimized).sum();
    Ok(result(
        10,
        "volume scaling",
        passed,
        json!({
            "samples": opts.volume_samples,
            "euclidean_exponent": euc.exponent,
            "cc_exponent": cc.exponent,
            "cc_optimized_samples": optimized,
            "cc_degraded_samples": degraded,
        }),
        &[],
    ))
}

pub fn pansu_diagonal(opts: &VerifyOptions) -> LabResult<CriterionResult> {
    let mut rng = rng(opts.seed, 11);
    let sched = BlowupSchedule::default();
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let coeffs: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let f = GroupMap::polynomial(MapKind::AbelianToAbelian, coeffs).module("pansu")?;
        let base = [0, 1, 2].map(|_| rng.gen_range(-2.0..2.0));
        let d = pansu_derivative(&f, base, [1.0; 3], &sched).module("pansu")?;
        let h = 1e-5;
        for i in 0..3 {
            for j in 0..3 {
                let fd = if i == j {
                    (f.component(base[i] + h) - f.component(base[i] - h)) / (2.0 * h)
                } else {
                    0.0
                };
                worst = worst.max((d.matrix[i][j] - fd).abs());
            }
        }
    }
    debug_assert_eq!(sched.convention, Convention::SourceGraded);
    Ok(result(
        11,
        "Pansu diagonal example",
        worst < 1e-6,
        json!({"bases": 20, "max_difference_from_central_differences": worst}),
        &[ledger::BLOWUP_DIRECTION, ledger::DILATION_CONVENTION],
    ))
}

fn octahedral(r: u64) -> u64 {
    (2 * r + 1) * (2 * r * r + 2 * r + 3) / 3
}

pub fn discrete_growth(_opts: &VerifyOptions) -> LabResult<CriterionResult> {
    let std_heis = Group::HeisZ.standard_generators();
    let heis = word_ball(&std_heis, 40, DEFAULT_BUDGET_BYTES).module("cayley_growth")?;
    let heis_fit = growth_fit(&heis, 10, 30).module("cayley_growth")?;
    let aniso = anisotropy(&heis, 10, 40).module("cayley_growth")?;
    let z3 = word_ball(&Group::Z3.standard_generators(), 40, DEFAULT_BUDGET_BYTES).module("cayley_growth")?;
    let z3_fit = growth_fit(&z3, 10, 40).module("cayley_growth")?;
    let oracle_ok = z3.counts.iter().enumerate().all(|(r, n)| *n == octahedral(r as u64));
    let t1t2 = Group::HeisZ
        .mul(&ZGroupElement::new(1, 0, 0), &ZGroupElement::new(0, 1, 0))
        .module("cayley_growth")?;
    let wide = GeneratingSet::new(
        Group::HeisZ,
        vec![ZGroupElement::new(1, 0, 0), ZGroupElement::new(0, 1, 0), t1t2],
    )
    .module("cayley_growth")?;
    let robust = generator_robustness(&std_heis, &wide, 30, (10, 30), DEFAULT_BUDGET_BYTES).module("cayley_growth")?;
    let peak_bytes = heis.peak_elements * carnot_core::cayley::BYTES_PER_ELEMENT;
    let passed = heis.counts[..3] == [1, 5, 17]
        && (heis_fit.d - 4.0).abs() <= 0.25
        && (z3_fit.d - 3.0).abs() <= 0.1
        && oracle_ok
        && robust.delta <= ROBUSTNESS_TOL
        && robust.warning.is_none()
        && (aniso.central_exponent - 2.0).abs() <= 0.2
        && peak_bytes < 4 << 30;
    Ok(result(
        12,
        "discrete growth",
        passed,
        json!({
            "heis_first_counts": &heis.counts[..3],
            "heis_exponent_10_30": heis_fit.d,
            "heis_max_residual": heis_fit.max_residual,
            "z3_exponent_10_40": z3_fit.d,
            "z3_matches_octahedral_oracle": oracle_ok,
            "robustness_delta": robust.delta,
            "robustness_ratio_bounds": [robust.ratio_bounds.0, robust.ratio_bounds.1],
            "central_growth_exponent": aniso.central_exponent,
            "planar_growth_exponent": aniso.planar_exponent,
            "estimated_peak_bytes": peak_bytes,
        }),
        &[],
    ))
}

type Criterion = fn(&VerifyOptions) -> LabResult<CriterionResult>;

pub const ALL: [Criterion; CRITERIA as usize] = [
    q_composition,
    abe_identity,
    bgs_limit,
    group_exactness,
    commutator_oracle,
    left_invariance,
    holonomy_area,
    distance_anchors,
    dilation_homogeneity,
    volume_scaling,
    pansu_diagonal,
    discrete_growth,
];

/// Runs every criterion in order, returning results and elapsed times.
pub fn run_all(opts: &VerifyOptions) -> LabResult<(Vec<CriterionResult>, Vec<Duration>)> {
    let mut results = Vec::with_capacity(ALL.len());
    let mut times = Vec::with_capacity(ALL.len());
    for criterion in ALL {
        let started = Instant::now();
        results.push(criterion(opts)?);
        times.push(started.elapsed());
    }
    Ok((results, times))
}
