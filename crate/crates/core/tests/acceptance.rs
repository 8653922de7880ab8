//! Acceptance criteria. Runs as a plain binary so every criterion prints
//! one PASS/FAIL line even when the suite succeeds; the process fails if any
//! criterion fails.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cqam_core::constellation::{
    gray_label_star, make_cqam_greedy, make_cqam_hybrid, make_cqam_star, make_cqam_two_dist,
    make_square_qam, measure, rotate, star_default_gap, Constellation, FigureReport,
    DEFAULT_PHASE_GRID, DEFAULT_RADIUS_STEP,
};
use cqam_core::linksim::{effective_snr, optimal_launch, reach_curve, LinkModel};
use cqam_core::pas::{
    ccdm_decode, ccdm_encode, compatibility_residual, input_bits, kl_bits, min_code_rate,
    pas_frame, plan_frame, plan_rates, quantize_composition, split_for, Composition, Layering,
    RegionMap,
};
use cqam_core::rates::{
    capacity, cm_mi_mc, cm_mi_quad, evaluate, snr_gap, snr_gap_with, Method, Metric,
};
use cqam_core::shaping::{
    lambda_for_entropy, mb_weights, optimize_lambda_for_mi, optimize_stretch, shaped_gaps,
    Objective,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn greedy8() -> Constellation {
    gray_label_star(&make_cqam_greedy(8, DEFAULT_PHASE_GRID, DEFAULT_RADIUS_STEP).unwrap()).unwrap()
}

fn suite_formats() -> Vec<Constellation> {
    vec![
        make_square_qam(3).unwrap(),
        gray_label_star(&make_cqam_star(8, star_default_gap(8)).unwrap()).unwrap(),
        gray_label_star(&make_cqam_two_dist(8).unwrap()).unwrap(),
        gray_label_star(&make_cqam_hybrid(8).unwrap()).unwrap(),
        greedy8(),
    ]
}

const SUITE_SNR_DB: [f64; 5] = [0.0, 5.0, 10.0, 15.0, 20.0];

fn capacity_anchor() -> Outcome {
    let v = capacity(10.0);
    let err = (v - 11f64.log2()).abs();
    outcome(
        err <= 1e-9 && (v - 3.45943).abs() < 5e-6,
        format!("capacity(10 dB) = {v:.9} bits, |err| = {err:.1e}"),
    )
}

fn shaped_cqam_gap() -> Outcome {
    let search =
        optimize_stretch(&greedy8(), &[8.0, 10.0, 12.0], Metric::Cm, Method::quad()).unwrap();
    let grid: Vec<f64> = (0..=8).map(|k| 8.0 + 0.5 * k as f64).collect();
    let points = shaped_gaps(&search.constellation, &grid, Metric::Cm, Method::quad()).unwrap();
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut consistent = true;
    for p in &points {
        // the same gap through the bisection search on the fixed shaped format
        let shaped = mb_weights(&search.constellation, p.lambda)
            .unwrap()
            .constellation;
        let g = snr_gap(&shaped, p.rate_bits, Metric::Cm, Method::quad()).unwrap();
        consistent &= (g - p.gap_db).abs() < 1e-5;
        worst = worst.max(p.gap_db);
    }
    let listing: Vec<String> = points
        .iter()
        .map(|p| format!("{:.1}:{:.3}", p.snr_db, p.gap_db))
        .collect();
    outcome(
        worst <= 0.12 && consistent,
        format!(
            "stretch alpha = {:.2}; worst gap over 8..12 dB = {worst:.4} dB (limit 0.12); gaps [{}]",
            search.alpha,
            listing.join(" ")
        ),
    )
}

fn shaping_gain_bound() -> Outcome {
    let c = make_square_qam(3).unwrap();
    let target = 4.0;
    let uniform = snr_gap(&c, target, Metric::Cm, Method::quad()).unwrap();
    let shaped = snr_gap_with(target, |s| {
        let p = optimize_lambda_for_mi(&c, s, Metric::Cm, Method::quad()).unwrap();
        let Objective::MiMax { rate_bits, .. } = p.objective else {
            unreachable!()
        };
        Ok(rate_bits)
    })
    .unwrap();
    let gain = uniform - shaped;
    outcome(
        gain > 0.0 && gain < 1.53,
        format!("64-QAM at CM = 4 bits: uniform gap {uniform:.4} dB, shaped gap {shaped:.4} dB, gain {gain:.4} dB"),
    )
}

fn entropy_anchor() -> Outcome {
    let p = lambda_for_entropy(&make_square_qam(3).unwrap(), 5.45).unwrap();
    let err = (p.entropy_bits - 5.45).abs();
    outcome(
        err <= 1e-6,
        format!(
            "64-QAM lambda = {:.6}, |H - 5.45| = {err:.1e} bits",
            p.lambda
        ),
    )
}

fn rate_ordering() -> Outcome {
    let tol = 2e-3;
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut where_ = String::new();
    for c in suite_formats() {
        for s in SUITE_SNR_DB {
            let p = evaluate(
                &c,
                s,
                &[Metric::Cm, Metric::Scm, Metric::Bcm],
                Method::quad(),
            )
            .unwrap();
            let (cm, scm, bcm) = (p.cm.bits, p.scm.unwrap().bits, p.bcm.unwrap().bits);
            let bound = c.entropy_bits().min(capacity(s));
            for (excess, what) in [
                (bcm - scm, "bcm>scm"),
                (scm - cm, "scm>cm"),
                (cm - bound, "cm>bound"),
            ] {
                if excess > worst {
                    worst = excess;
                    where_ = format!("{} @ {s} dB ({what})", c.name());
                }
            }
        }
    }
    outcome(
        worst <= tol,
        format!("largest violation {worst:.2e} bits at {where_} (tolerance {tol:.0e})"),
    )
}

fn estimator_agreement() -> Outcome {
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for (f, c) in suite_formats().iter().enumerate() {
        for (k, s) in SUITE_SNR_DB.iter().enumerate() {
            let seed = 20_000 + 100 * f as u64 + k as u64;
            let quad = cm_mi_quad(c, *s, 48).unwrap();
            let mc = cm_mi_mc(c, *s, 1_000_000, seed).unwrap();
            let z = (mc.bits - quad).abs() / mc.stderr.unwrap();
            worst = worst.max(z);
            if z > 3.0 {
                failures.push(format!("{} @ {s} dB: {z:.2} sigma", c.name()));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "25 points, largest |MC - quad| = {worst:.2} stderr{}",
            if failures.is_empty() {
                String::new()
            } else {
                format!("; over 3: {}", failures.join(", "))
            }
        ),
    )
}

fn pas_algebra() -> Outcome {
    let exact = min_code_rate(2.0) == 2.0 / 3.0
        && min_code_rate(1.0) == 0.5
        && plan_rates(Layering::BinaryPerAxis, 2.0, 0.9, 0.0)
            .unwrap()
            .r_c
            == 2.0 / 3.0
        && plan_rates(Layering::Circular { q: 8 }, 1.0, 0.9, 0.0)
            .unwrap()
            .r_c
            == 0.5;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_residual = 0.0f64;
    let mut worst_round_trip = 0.0f64;
    let mut tuples = 0;
    while tuples < 1000 {
        let q = [2usize, 4, 8, 16][rng.random_range(0..4)];
        let r_am = rng.random_range(1.0..4.0);
        let r_dm = rng.random_range(0.05..1.0);
        let split = rng.random_range(0.0..0.5);
        let Ok(p) = plan_rates(Layering::Circular { q }, r_am, r_dm, split) else {
            continue;
        };
        tuples += 1;
        worst_residual =
            worst_residual.max(compatibility_residual(p.r_am, p.r_dm, p.r_c, p.split).abs());
        let back = split_for(Layering::Circular { q }, r_am, r_dm, p.r_c).unwrap();
        worst_round_trip = worst_round_trip
            .max((back.split - split).abs())
            .max((back.r_t - p.r_t).abs());
    }
    outcome(
        exact && worst_residual <= 1e-12 && worst_round_trip <= 1e-12,
        format!(
            "bounds exact: {exact}; 1000 tuples: max residual {worst_residual:.1e}, max round-trip error {worst_round_trip:.1e}"
        ),
    )
}

fn matcher() -> Outcome {
    let shaped = mb_weights(&greedy8(), 1.5).unwrap().constellation;
    let map = RegionMap::new(&shaped).unwrap();
    let target = map.amplitude_distribution(&shaped);
    let comp = quantize_composition(&target, 64).unwrap();
    let k = input_bits(&comp);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut round_trips = 0;
    let mut exact_composition = 0;
    for _ in 0..10_000 {
        let bits: Vec<bool> = (0..k).map(|_| rng.random()).collect();
        let s = ccdm_encode(&bits, &comp).unwrap();
        exact_composition +=
            usize::from(Composition::of_sequence(&s, comp.classes()).unwrap() == comp);
        round_trips += usize::from(ccdm_decode(&s, &comp).unwrap() == bits);
    }
    let mut kls = Vec::new();
    for n in [100, 1000, 10_000] {
        let fp = plan_frame(&shaped, n, 0.6).unwrap();
        let payload: Vec<bool> = (0..fp.payload_bits).map(|_| rng.random()).collect();
        let frame = pas_frame(&payload, &fp, &shaped, n as u64).unwrap();
        let hist = Composition::of_sequence(&frame.amplitudes, map.base_len()).unwrap();
        kls.push(kl_bits(&hist.distribution(), &target));
    }
    let monotone = kls.windows(2).all(|w| w[1] <= w[0]);
    outcome(
        round_trips == 10_000 && exact_composition == 10_000 && monotone,
        format!(
            "{round_trips}/10000 round trips, {exact_composition}/10000 exact compositions ({k}-bit input); KL at n = 100, 1000, 10000: {:.2e}, {:.2e}, {:.2e} bits",
            kls[0], kls[1], kls[2]
        ),
    )
}

fn golden_argmax(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while hi - lo > 1e-13 * hi.abs().max(1e-300) {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if f(a) < f(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    0.5 * (lo + hi)
}

fn link_model() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst_rel = 0.0f64;
    let mut worst_foc = 0.0f64;
    for _ in 0..100 {
        let model = LinkModel {
            spans: rng.random_range(1..80),
            ase_per_span: 10f64.powf(rng.random_range(-5.0..-1.0)),
            eta0: 10f64.powf(rng.random_range(-4.0..-1.0)),
            eta_moment_slope: rng.random_range(0.0..1e-4),
            ..LinkModel::default()
        };
        let report = FigureReport {
            d_min_sq: 0.1,
            mean_power: 1.0,
            fom: 1.0,
            mu4: rng.random_range(1.0..2.5),
            mu6: 0.0,
        };
        let (p, _) = optimal_launch(&model, &report).unwrap();
        // search in log-power, where the objective is smooth and unimodal
        let numeric = golden_argmax(
            |lp| effective_snr(lp.exp(), &model, &report).unwrap().ln(),
            p.ln() - 10.0,
            p.ln() + 10.0,
        )
        .exp();
        worst_rel = worst_rel.max((numeric - p).abs() / p);
        let ase = model.ase_total();
        worst_foc = worst_foc.max((model.eta_eff(report.mu4) * p.powi(3) - ase / 2.0).abs() / ase);
    }
    let report = measure(&make_square_qam(3).unwrap());
    let snr: Vec<f64> = (1..=60)
        .map(|n| {
            optimal_launch(&LinkModel::default().with_spans(n), &report)
                .unwrap()
                .1
        })
        .collect();
    let decreasing = snr.windows(2).all(|w| w[1] < w[0]);
    outcome(
        worst_rel <= 1e-6 && worst_foc <= 1e-9 && decreasing,
        format!(
            "100 models: max |p_num - p_opt|/p_opt = {worst_rel:.1e}, max first-order residual {worst_foc:.1e}; snr_opt strictly decreasing over 1..60 spans: {decreasing}"
        ),
    )
}

fn reach_property() -> Outcome {
    // experimental figures are out of reach; only the qualitative property
    // of the surrogate link is checked
    let model = LinkModel::default();
    let spans: Vec<usize> = (10..=60).step_by(10).collect();
    let method = Method::Quadrature { order: 32 };
    let cqam = reach_curve(&greedy8(), &model, &spans, Metric::Cm, method).unwrap();
    let qam = reach_curve(
        &make_square_qam(3).unwrap(),
        &model,
        &spans,
        Metric::Cm,
        method,
    )
    .unwrap();
    let worst = cqam
        .iter()
        .zip(&qam)
        .map(|(a, b)| (a.snr_opt_db - b.snr_opt_db).abs())
        .fold(0.0, f64::max);
    let mu4 = |c: &Constellation, l: f64| measure(&mb_weights(c, l).unwrap().constellation).mu4;
    outcome(
        worst <= 0.1,
        format!(
            "NOT REPRODUCIBLE: lab measurements (back-to-back gain, WDM and modeled reach gains, absolute link SNRs) need hardware and an external nonlinear-noise model; \
             substituted by criteria 2, 5, 9 and this surrogate check: shaped CQAM vs shaped QAM optimum SNR differ by at most {worst:.3} dB over 10..60 spans \
             (chosen lambda {} vs {}, mu4 {:.3} vs {:.3})",
            cqam[0].lambda_opt,
            qam[0].lambda_opt,
            mu4(&greedy8(), cqam[0].lambda_opt),
            mu4(&make_square_qam(3).unwrap(), qam[0].lambda_opt)
        ),
    )
}

fn rotation_symmetry() -> Outcome {
    let c = greedy8();
    let base = cm_mi_quad(&c, 10.0, 48).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let worst = (0..20)
        .map(|_| {
            let r = rotate(&c, rng.random_range(0.0..std::f64::consts::TAU));
            (cm_mi_quad(&r, 10.0, 48).unwrap() - base).abs()
        })
        .fold(0.0, f64::max);
    outcome(
        worst <= 1e-9,
        format!("20 random rotations at 10 dB: max |delta CM| = {worst:.1e} bits"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("capacity anchor", capacity_anchor),
        ("shaped CQAM gap to capacity", shaped_cqam_gap),
        ("shaping gain bound", shaping_gain_bound),
        ("entropy targeting", entropy_anchor),
        ("rate ordering", rate_ordering),
        ("estimator cross-validation", estimator_agreement),
        ("PAS rate algebra", pas_algebra),
        ("distribution matcher", matcher),
        ("link model optimum", link_model),
        ("experimental results (surrogate)", reach_property),
        ("rotation invariance", rotation_symmetry),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let id = k + 1;
        if !filter.is_empty()
            && !filter
                .iter()
                .any(|f| name.contains(f.as_str()) || *f == id.to_string())
        {
            continue;
        }
        let t = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "{verdict} criterion {id:>2} ({name}) [{:.1}s]: {}",
            t.elapsed().as_secs_f64(),
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
