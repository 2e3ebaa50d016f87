//! Acceptance suite: one line per criterion.
//!
//! Criterion 1's ordering check fails on the event-day sequences as
//! labeled (B correlates slightly better than A). It is reported as FAIL
//! and listed in `KNOWN_FAILURES`; the run exits non-zero on any other
//! failure, or if a known failure starts passing.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use chrono::NaiveDate;
use coglab_cli::pipeline::{backtest, BacktestMode};
use coglab_core::affect::{decay, fit_decay, DecaySample, DecayTable};
use coglab_core::backtest::{
    simulate_portfolio, BacktestConfig, DefensiveAlpha, DEFAULT_COST_RATE,
};
use coglab_core::cogvec::Persona;
use coglab_core::cogvec::{CognitiveVector, DimensionRegistry, PersonaDayState};
use coglab_core::fixtures::{
    crash_drill, IC_INDEX_PCT, IC_REPORTED, IC_SENTIMENT_A, IC_SENTIMENT_B, IC_SENTIMENT_C,
};
use coglab_core::garch::{gjr_step, GarchParams, ParamArsenal};
use coglab_core::ingest::{ModelConfig, PriceSeries};
use coglab_core::macrostate::{
    mcfi, mdi, quadrant_membership, MacroFeatures, QuadrantId, QuadrantPrototypes,
};
use coglab_core::stats::{
    icc_consistency, js_divergence, moments, ols, pearson, shapiro_wilk, welch_t_one_tailed,
};
use coglab_core::textlab::{
    compare_corpora, fingerprint, generate_synthetic_comments, sentence_lengths, GenerationContext,
    GenerationRequest, Lexicons, MarketCondition, Metric, Physics, SentenceShape, SlangDictionary,
    TemplateBank,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Deserialize;

/// Sub-checks expected to fail: criterion, label, reason.
const KNOWN_FAILURES: [(u32, &str, &str); 1] =
    [(1, "ordering A > B > C", "labeled data ranks B above A")];

fn known_failure(id: u32, label: &str) -> Option<&'static str> {
    KNOWN_FAILURES
        .iter()
        .find(|k| k.0 == id && k.1 == label)
        .map(|k| k.2)
}

struct Check {
    label: String,
    ok: bool,
    detail: String,
}

#[derive(Default)]
struct Criterion {
    checks: Vec<Check>,
}

impl Criterion {
    fn check(&mut self, label: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            label: label.into(),
            ok,
            detail: detail.into(),
        });
    }

    fn within(&mut self, elapsed: Duration, limit: Duration) {
        self.check(
            format!("runtime < {:?}", limit),
            elapsed < limit,
            format!("{:.3}s", elapsed.as_secs_f64()),
        );
    }
}

fn criterion_1() -> Criterion {
    let mut c = Criterion::default();
    let start = Instant::now();
    let rs: Vec<_> = [&IC_SENTIMENT_A, &IC_SENTIMENT_B, &IC_SENTIMENT_C]
        .iter()
        .map(|s| pearson(&s[..], &IC_INDEX_PCT).expect("pearson"))
        .collect();
    for (i, name) in ["A", "B", "C"].iter().enumerate() {
        let diff = (rs[i].r - IC_REPORTED[i]).abs();
        c.check(
            format!("r_{name} = {} ± 0.005", IC_REPORTED[i]),
            diff <= 0.005,
            format!("r = {:.4}", rs[i].r),
        );
    }
    c.check("p_A < 1e-4", rs[0].p < 1e-4, format!("p = {:.3e}", rs[0].p));
    c.check(
        "ordering A > B > C",
        rs[0].r > rs[1].r && rs[1].r > rs[2].r,
        format!("{:.4} / {:.4} / {:.4}", rs[0].r, rs[1].r, rs[2].r),
    );
    c.within(start.elapsed(), Duration::from_secs(1));
    c
}

fn criterion_2() -> Criterion {
    let mut c = Criterion::default();
    let start = Instant::now();
    let p = GarchParams::new(0.1, 0.1, 0.1, 0.8).unwrap();
    let neg = gjr_step(1.0, -1.0, &p);
    let pos = gjr_step(1.0, 1.0, &p);
    c.check(
        "hand recursion",
        neg == 1.1 && pos == 1.0,
        format!("ε=-1 → {neg}, ε=+1 → {pos}"),
    );
    let flat = GarchParams::new(0.3, 0.0, 0.0, 0.0).unwrap();
    let mut h = 5.0;
    let mut constant = true;
    for t in 0..50 {
        h = gjr_step(h, (t as f64).sin(), &flat);
        constant &= h == 0.3;
    }
    c.check("degenerate ω-only recursion", constant, "h_t = ω");

    let arsenal = ParamArsenal::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut positive, mut identity, mut worst) = (0usize, 0usize, 0.0f64);
    const N: usize = 10_000;
    for _ in 0..N {
        let q = QuadrantId::ALL[rng.random_range(0..6)];
        let qp = arsenal.quadrant(q).unwrap();
        let draw =
            |r: &coglab_core::garch::ParamRange, rng: &mut ChaCha8Rng| r.at(rng.random::<f64>());
        let p = GarchParams {
            omega: draw(&qp.omega, &mut rng),
            alpha: draw(&qp.alpha, &mut rng),
            alpha_neg: draw(&qp.alpha_neg, &mut rng),
            beta: draw(&qp.beta, &mut rng),
        };
        let h_prev = rng.random_range(1e-6..2.0);
        let e: f64 = rng.random_range(1e-3..1.5);
        let down = gjr_step(h_prev, -e, &p);
        let up = gjr_step(h_prev, e, &p);
        positive += usize::from(down > 0.0 && up > 0.0);
        let gap = (down - up - p.alpha_neg * e * e).abs();
        worst = worst.max(gap);
        identity += usize::from(gap <= 1e-12 * (1.0 + down));
    }
    c.check(
        "h_t > 0 over 10^4 draws",
        positive == N,
        format!("{positive}/{N}"),
    );
    c.check(
        "asymmetry gap = α⁻ε² over 10^4 draws",
        identity == N,
        format!("max |gap| error {worst:.1e}"),
    );

    let p = GarchParams::new(0.01, 0.05, 0.10, 0.85).unwrap();
    let target = p.long_run_variance().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut h = target;
    let (mut sum, steps, burn) = (0.0, 400_000usize, 1_000usize);
    for t in 0..steps + burn {
        let z: f64 = StandardNormal.sample(&mut rng);
        let eps = h.sqrt() * z;
        h = gjr_step(h, eps, &p);
        if t >= burn {
            sum += eps * eps;
        }
    }
    let realized = sum / steps as f64;
    let rel = (realized - target).abs() / target;
    c.check(
        "long-run variance within 5%",
        rel < 0.05,
        format!(
            "simulated {realized:.5} vs {target:.5} ({:.2}%)",
            rel * 100.0
        ),
    );
    c.within(start.elapsed(), Duration::from_secs(5));
    c
}

fn criterion_3() -> Criterion {
    let mut c = Criterion::default();
    for alpha in [0.05, 0.11, 0.20, 0.25, 0.32] {
        let samples: Vec<DecaySample> = [0.4, 0.55, 0.7, 0.85, 1.0]
            .iter()
            .flat_map(|&e| {
                [1.0, 2.0, 3.0, 5.0, 8.0, 13.0].map(|t: f64| DecaySample {
                    e_t: e,
                    elapsed: t,
                    e_next: e * t.powf(-alpha),
                })
            })
            .collect();
        let fit = fit_decay(&samples).unwrap();
        let rel = (fit.alpha - alpha).abs() / alpha;
        c.check(
            format!("fit α = {alpha}"),
            rel <= 1e-6,
            format!("α̂ = {:.9}", fit.alpha),
        );
    }
    let table = DecayTable::default();
    let (mut lo, mut hi) = (1.0f64, 100.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if decay(1.0, mid, "fear", &table).unwrap() > 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    let closed = 2f64.powf(1.0 / 0.32);
    c.check(
        "fear half-life 8.72 ± 0.01",
        (root - 8.72).abs() <= 0.01
            && (closed - 8.72).abs() <= 0.01
            && (root - closed).abs() < 1e-9,
        format!("root {root:.6}, closed form {closed:.6}"),
    );
    c
}

fn criterion_4() -> Criterion {
    let mut c = Criterion::default();
    let cfg = ModelConfig::default();
    let (mut smaller, mut alpha_pos, mut consistent) = (0, 0, 0);
    let seeds = 0..20u64;
    let mut example = String::new();
    for seed in seeds.clone() {
        let drill = crash_drill(seed);
        let bt = backtest(
            &drill.prices,
            &drill.days,
            BacktestMode::Dynamic,
            -0.05,
            &cfg,
        )
        .unwrap();
        let r = &bt.report;
        let da = r
            .defensive_alpha
            .expect("dynamic run carries defensive alpha");
        smaller += usize::from(r.metrics.max_drawdown < r.baseline_metrics.max_drawdown);
        alpha_pos += usize::from(da.da > 0.0);
        consistent += usize::from(
            (da.safety_buffer - da.da / DEFAULT_COST_RATE).abs() <= 1e-9 * da.safety_buffer.abs(),
        );
        if seed == 0 {
            example = format!(
                "seed 0: max DD {:.4} vs {:.4}, da {:.4}, buffer {:.2}",
                r.metrics.max_drawdown, r.baseline_metrics.max_drawdown, da.da, da.safety_buffer
            );
        }
    }
    let n = seeds.count();
    c.check(
        "dynamic max DD < baseline",
        smaller == n,
        format!("{smaller}/{n} seeds; {example}"),
    );
    c.check(
        "defensive alpha > 0",
        alpha_pos == n,
        format!("{alpha_pos}/{n} seeds"),
    );
    c.check(
        "buffer = da / 0.0026",
        consistent == n,
        format!("{consistent}/{n} seeds"),
    );
    let buffer = DefensiveAlpha::from_terminal(1.086, 1.0, DEFAULT_COST_RATE)
        .unwrap()
        .safety_buffer;
    c.check(
        "da 0.086 → buffer ≈ 33.1",
        (buffer - 33.1).abs() < 0.05,
        format!("{buffer:.3}"),
    );
    c
}

fn dates(n: usize) -> Vec<NaiveDate> {
    let start = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
    (0..n)
        .map(|i| start + chrono::Days::new(i as u64))
        .collect()
}

fn criterion_5() -> Criterion {
    let mut c = Criterion::default();
    let d = dates(3);
    let prices = PriceSeries::from_closes(&d, &[10.0, 10.0, 10.0]).unwrap();
    let exp: Vec<(NaiveDate, f64)> = d.iter().copied().zip([1.0, 0.0, 0.0]).collect();
    let run = simulate_portfolio(&prices, &exp, &BacktestConfig::default()).unwrap();
    let expected = (1.0 - 0.0026f64).powi(2);
    let end = run.final_equity();
    c.check(
        "flat enter/exit = (1-0.0026)^2 ± 1e-12",
        (end - expected).abs() <= 1e-12,
        format!("{end:.15}"),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut held = 0;
    for _ in 0..1000 {
        let n = rng.random_range(2..60);
        let d = dates(n);
        let mut level = 100.0;
        let closes: Vec<f64> = (0..n)
            .map(|i| {
                if i > 0 {
                    level *= 1.0 + rng.random_range(-0.1..0.1);
                }
                level
            })
            .collect();
        let prices = PriceSeries::from_closes(&d, &closes).unwrap();
        let exp: Vec<(NaiveDate, f64)> = d.iter().map(|&day| (day, rng.random::<f64>())).collect();
        let rate = rng.random_range(0.0..0.01);
        let with = simulate_portfolio(
            &prices,
            &exp,
            &BacktestConfig {
                cost_rate: rate,
                ..BacktestConfig::default()
            },
        )
        .unwrap()
        .final_equity();
        let without = simulate_portfolio(&prices, &exp, &BacktestConfig::frictionless())
            .unwrap()
            .final_equity();
        held += usize::from(with <= without);
    }
    c.check(
        "costs never raise terminal equity",
        held == 1000,
        format!("{held}/1000 paths"),
    );
    c
}

fn generate(i_rhythm: f64, n: usize, seed: u64) -> Vec<String> {
    let req = GenerationRequest {
        context: GenerationContext {
            condition: MarketCondition::Crash,
            event: "降息".into(),
        },
        persona_mix: vec![(Persona::Novice, 0.6), (Persona::Veteran, 0.4)],
        physics: Physics {
            i_rhythm,
            p_leap: 0.2,
        },
        shape: SentenceShape::default(),
        n,
        seed,
    };
    generate_synthetic_comments(&req, &SlangDictionary::builtin(), &TemplateBank::builtin())
        .unwrap()
        .into_iter()
        .map(|c| c.text)
        .collect()
}

fn lengths(corpus: &[String]) -> Vec<f64> {
    corpus
        .iter()
        .flat_map(|t| sentence_lengths(t))
        .map(|l| l as f64)
        .collect()
}

fn criterion_6() -> Criterion {
    let mut c = Criterion::default();
    let start = Instant::now();
    let mut cv = Vec::new();
    let (mut rejects, mut skewed) = (0, 0);
    for i_rhythm in [0.1, 0.85, 1.2] {
        let mut total = 0.0;
        for seed in 0..50 {
            let x = lengths(&generate(i_rhythm, 100, seed));
            let m = moments(&x).unwrap();
            total += m.cv.unwrap();
            if i_rhythm == 0.85 {
                rejects += usize::from(shapiro_wilk(&x).unwrap().p < 0.05);
                skewed += usize::from(m.skewness.unwrap() > 0.5);
            }
        }
        cv.push(total / 50.0);
    }
    c.check(
        "mean CV strictly increasing over 0.1, 0.85, 1.2",
        cv[0] < cv[1] && cv[1] < cv[2],
        format!("{:.4} < {:.4} < {:.4}", cv[0], cv[1], cv[2]),
    );
    c.check(
        "0.85: Shapiro-Wilk p < 0.05",
        rejects == 50,
        format!("{rejects}/50 seeds"),
    );
    c.check(
        "0.85: skewness > 0.5",
        skewed == 50,
        format!("{skewed}/50 seeds"),
    );
    c.within(start.elapsed(), Duration::from_secs(30));
    c
}

#[derive(Deserialize)]
struct SwCase {
    x: Vec<f64>,
    w: f64,
}

#[derive(Deserialize)]
struct WelchCase {
    a: Vec<f64>,
    b: Vec<f64>,
    p: f64,
}

#[derive(Deserialize)]
struct Oracle {
    shapiro: Vec<SwCase>,
    welch: Vec<WelchCase>,
}

fn core_fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

fn criterion_7() -> Criterion {
    let mut c = Criterion::default();
    let oracle: Oracle =
        serde_json::from_str(&std::fs::read_to_string(core_fixture("stats_oracle.json")).unwrap())
            .unwrap();
    let worst_w = oracle
        .shapiro
        .iter()
        .map(|s| (shapiro_wilk(&s.x).unwrap().w - s.w).abs())
        .fold(0.0, f64::max);
    c.check(
        format!(
            "Shapiro-Wilk W within 1e-3 ({} samples)",
            oracle.shapiro.len()
        ),
        oracle.shapiro.len() >= 50 && worst_w <= 1e-3,
        format!("max |ΔW| {worst_w:.2e}"),
    );
    let worst_p = oracle
        .welch
        .iter()
        .map(|w| (welch_t_one_tailed(&w.a, &w.b).unwrap().p - w.p).abs() / w.p)
        .fold(0.0, f64::max);
    c.check(
        "Welch p within 10%",
        worst_p <= 0.10,
        format!("max rel err {:.2e}", worst_p),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let raters: Vec<f64> = (0..30).map(|_| rng.random_range(-1.0..1.0)).collect();
    let same: Vec<(f64, f64)> = raters.iter().map(|&x| (x, x)).collect();
    let shifted: Vec<(f64, f64)> = raters.iter().map(|&x| (x, x + 0.7)).collect();
    let (i1, i2) = (
        icc_consistency(&same).unwrap(),
        icc_consistency(&shifted).unwrap(),
    );
    c.check(
        "ICC(C,1) = 1 for identical and offset raters",
        (i1 - 1.0).abs() < 1e-12 && (i2 - 1.0).abs() < 1e-12,
        format!("{i1}, {i2}"),
    );

    let mut ok = 0;
    const FUZZ: usize = 500;
    for _ in 0..FUZZ {
        let k = rng.random_range(2..12);
        let norm = |v: Vec<f64>| {
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect::<Vec<_>>()
        };
        let p = norm((0..k).map(|_| rng.random_range(0.0..1.0) + 1e-9).collect());
        let q = norm((0..k).map(|_| rng.random_range(0.0..1.0) + 1e-9).collect());
        let pq = js_divergence(&p, &q).unwrap();
        let qp = js_divergence(&q, &p).unwrap();
        let pp = js_divergence(&p, &p).unwrap();
        let mut a = vec![0.0; 2 * k];
        let mut b = vec![0.0; 2 * k];
        a[..k].copy_from_slice(&p);
        b[k..].copy_from_slice(&q);
        let disjoint = js_divergence(&a, &b).unwrap();
        ok += usize::from(
            (pq - qp).abs() < 1e-12
                && (0.0..=1.0).contains(&pq)
                && pp.abs() < 1e-12
                && (disjoint - 1.0).abs() < 1e-12,
        );
    }
    c.check(
        "JSD symmetric, bounded, zero on identity, 1 on disjoint",
        ok == FUZZ,
        format!("{ok}/{FUZZ} cases"),
    );

    let rows: Vec<Vec<f64>> = (0..80)
        .map(|_| {
            let (x1, x2) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            vec![1.0, x1, x2, x1 * x2]
        })
        .collect();
    let y: Vec<f64> = rows
        .iter()
        .map(|r| 0.5 + 1.5 * r[1] - 0.7 * r[2] + 0.3 * r[3] + rng.random_range(-0.5..0.5))
        .collect();
    let fit = ols(&rows, &y).unwrap();
    let worst = (0..4)
        .map(|j| {
            rows.iter()
                .zip(&fit.residuals)
                .map(|(r, e)| r[j] * e)
                .sum::<f64>()
                .abs()
        })
        .fold(0.0, f64::max);
    c.check(
        "OLS residuals orthogonal to design ≤ 1e-9",
        worst <= 1e-9,
        format!("max |X'e| {worst:.1e}"),
    );
    c
}

fn criterion_8() -> Criterion {
    let mut c = Criterion::default();
    let lex = Lexicons::builtin();
    let reference = fingerprint(&generate(0.85, 200, 101), &lex).unwrap();
    let x = fingerprint(&generate(0.85, 200, 202), &lex).unwrap();
    let y = fingerprint(&generate(0.1, 200, 303), &lex).unwrap();
    let jx = compare_corpora(&x, &reference, 20).unwrap();
    let jy = compare_corpora(&y, &reference, 20).unwrap();
    for metric in [Metric::SentenceLengthSd, Metric::AvgSentenceLength] {
        let a = jx.iter().find(|(m, _)| *m == metric).unwrap().1;
        let b = jy.iter().find(|(m, _)| *m == metric).unwrap().1;
        c.check(
            format!("{}: JSD(X, ref) < JSD(Y, ref)", metric.label()),
            a < b,
            format!("{a:.4} < {b:.4}"),
        );
    }
    c
}

fn criterion_9() -> Criterion {
    let mut c = Criterion::default();
    let reg = DimensionRegistry::default().shared();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let date = NaiveDate::from_ymd_opt(2015, 6, 15).unwrap();
    let (mut mdi_ok, mut worst) = (0, 0.0f64);
    for _ in 0..1000 {
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..reg.len())
                .map(|_| rng.random_range(-1.0..=1.0))
                .collect()
        };
        let (a, b) = (draw(&mut rng), draw(&mut rng));
        let n = CognitiveVector::from_dense(&reg, a).unwrap();
        let v = CognitiveVector::from_dense(&reg, b).unwrap();
        let mut brute = 0.0;
        for label in reg.labels() {
            let d = n.get(label).unwrap() - v.get(label).unwrap();
            brute += d * d;
        }
        let brute = brute.sqrt();
        let got = mdi(&PersonaDayState::new(date, n, v, 0.0).unwrap()).unwrap();
        worst = worst.max((got - brute).abs());
        mdi_ok += usize::from((got - brute).abs() <= 1e-12);
    }
    c.check(
        "MDI = brute force on 1000 pairs",
        mdi_ok == 1000,
        format!("max |Δ| {worst:.1e}"),
    );

    let mut exact = 0;
    for _ in 0..1000 {
        let (j, a) = (rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
        exact += usize::from(mcfi(j, a, 0.6).unwrap() == 0.6 * j + 0.4 * a);
    }
    c.check(
        "MCFI = 0.6·joy + 0.4·anticipation exactly",
        exact == 1000,
        format!("{exact}/1000"),
    );

    let protos = QuadrantPrototypes::default();
    let (mut sums, mut argmax) = (0, 0);
    for _ in 0..1000 {
        let f = MacroFeatures {
            mdi: rng.random_range(0.0..1.6),
            mcfi: rng.random_range(-1.0..1.0),
            v_mdi: rng.random_range(-0.5..0.5),
            v_mcfi: rng.random_range(-0.5..0.5),
            meta: rng.random_range(0.0..1.0),
        };
        let m = quadrant_membership(&f, &protos).unwrap();
        sums += usize::from((m.probabilities.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        let nearest = QuadrantId::ALL
            .into_iter()
            .min_by(|p, q| {
                let d = |id: &QuadrantId| {
                    let c = &protos.centroids[id];
                    (f.mdi - c.mdi).powi(2)
                        + (f.mcfi - c.mcfi).powi(2)
                        + (f.v_mdi - c.v_mdi).powi(2)
                        + (f.v_mcfi - c.v_mcfi).powi(2)
                        + (f.meta - c.meta).powi(2)
                };
                d(p).total_cmp(&d(q))
            })
            .unwrap();
        let top = m.probability(m.dominant);
        argmax += usize::from(m.dominant == nearest && m.probabilities.iter().all(|&p| p <= top));
    }
    c.check(
        "quadrant probabilities sum to 1 ± 1e-9",
        sums == 1000,
        format!("{sums}/1000"),
    );
    c.check(
        "dominant quadrant = brute-force argmax",
        argmax == 1000,
        format!("{argmax}/1000"),
    );
    c
}

fn coglab(out: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_coglab"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("COGLAB_CONFIG")
        .output()
        .expect("spawn coglab")
}

fn criterion_10() -> Criterion {
    let mut c = Criterion::default();
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let f = |p: &str| fixtures.join(p).display().to_string();
    let work = tempfile::tempdir().unwrap();
    let reports = f("reports");
    let noisy = work.path().join("noisy.toml");
    std::fs::write(&noisy, "noise_sd = 0.05\n").unwrap();
    let states = work.path().join("states.csv");
    let first = coglab(&work.path().join("ingest0"), &["ingest", &reports]);
    assert!(
        first.status.success(),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    std::fs::copy(work.path().join("ingest0/day_states.csv"), &states).unwrap();
    let states = states.display().to_string();
    let noisy = noisy.display().to_string();
    let a = f("ic/A.csv");
    let b = f("ic/B.csv");
    let cc = f("ic/C.csv");
    let index = f("ic/index.csv");
    let prices = f("prices.csv");
    let decay_csv = f("calibration/decay.csv");
    let corpus_dir = work.path().join("corpus");
    let gen = coglab(
        &corpus_dir,
        &["--seed", "4", "perturb", "generate", "--n", "60"],
    );
    assert!(gen.status.success());
    let corpus = corpus_dir.join("corpus.txt").display().to_string();
    let other_dir = work.path().join("other");
    let gen = coglab(
        &other_dir,
        &[
            "--seed",
            "5",
            "perturb",
            "generate",
            "--n",
            "60",
            "--i-rhythm",
            "0.1",
        ],
    );
    assert!(gen.status.success());
    let other = other_dir.join("corpus.txt").display().to_string();

    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("ingest", vec!["ingest", &reports]),
        ("macro", vec!["macro", &states]),
        (
            "simulate",
            vec![
                "--config",
                &noisy,
                "--seed",
                "17",
                "simulate",
                &states,
                "--shock",
                "2:fear_inducing",
                "--sweep",
                "3",
            ],
        ),
        (
            "backtest",
            vec!["backtest", "--prices", &prices, "--states", &states],
        ),
        (
            "backtest drill",
            vec![
                "--seed",
                "3",
                "backtest",
                "--drill",
                "--mode",
                "static-garch",
            ],
        ),
        ("abtest", vec!["abtest", "--index", &index, &a, &b, &cc]),
        ("fingerprint", vec!["fingerprint", &corpus, &other]),
        (
            "perturb generate",
            vec![
                "--seed",
                "8",
                "perturb",
                "generate",
                "--n",
                "80",
                "--i-rhythm",
                "1.2",
            ],
        ),
        (
            "perturb distribution",
            vec![
                "--seed",
                "8",
                "perturb",
                "distribution",
                "--probs",
                "0.5,0.3,0.2",
                "--form",
                "additive",
                "--noise-sd",
                "0.05",
            ],
        ),
        ("calibrate", vec!["calibrate", "decay", &decay_csv]),
        ("validate", vec!["validate", "--reports", &reports]),
    ];
    for (name, args) in runs {
        let dirs = [
            work.path().join(format!("{name}-1")),
            work.path().join(format!("{name}-2")),
        ];
        let outs: Vec<_> = dirs.iter().map(|d| coglab(d, &args)).collect();
        let succeeded = outs.iter().all(|o| o.status.success());
        let same_stdout = outs[0].stdout == outs[1].stdout;
        let (identical, files) = compare_dirs(&dirs[0], &dirs[1]);
        c.check(
            format!("{name}: byte-identical outputs"),
            succeeded && same_stdout && identical,
            format!("{files} file(s)"),
        );
    }
    c
}

fn compare_dirs(a: &Path, b: &Path) -> (bool, usize) {
    let list = |d: &Path| {
        let mut v: Vec<_> = std::fs::read_dir(d)
            .map(|it| it.filter_map(|e| e.ok()).map(|e| e.file_name()).collect())
            .unwrap_or_default();
        v.sort();
        v
    };
    let (la, lb) = (list(a), list(b));
    if la.is_empty() || la != lb {
        return (false, la.len());
    }
    let same = la
        .iter()
        .all(|name| std::fs::read(a.join(name)).ok() == std::fs::read(b.join(name)).ok());
    (same, la.len())
}

type CriterionFn = fn() -> Criterion;

fn main() {
    let criteria: [(u32, &str, CriterionFn); 10] = [
        (1, "IC fixture reproduction", criterion_1),
        (2, "GJR-GARCH correctness", criterion_2),
        (3, "decay calibration round-trip", criterion_3),
        (4, "crash drill", criterion_4),
        (5, "cost accounting", criterion_5),
        (6, "rhythm regimes", criterion_6),
        (7, "statistics oracles", criterion_7),
        (8, "fingerprint ordering", criterion_8),
        (9, "macro-state oracles", criterion_9),
        (10, "determinism envelope", criterion_10),
    ];
    let mut unexpected = Vec::new();
    let mut passed = 0;
    for (id, title, run) in criteria {
        let crit = run();
        let ok = crit.checks.iter().all(|c| c.ok);
        passed += usize::from(ok);
        let summary: Vec<String> = crit
            .checks
            .iter()
            .map(|c| match (c.ok, known_failure(id, &c.label)) {
                (true, _) => format!("{} [{}]", c.label, c.detail),
                (false, Some(why)) => {
                    format!("FAILED {} [{}; known failure: {why}]", c.label, c.detail)
                }
                (false, None) => format!("FAILED {} [{}]", c.label, c.detail),
            })
            .collect();
        println!(
            "{} {:>2}. {}: {}",
            if ok { "PASS" } else { "FAIL" },
            id,
            title,
            summary.join("; ")
        );
        for check in &crit.checks {
            let known = known_failure(id, &check.label).is_some();
            if check.ok == known {
                unexpected.push(format!(
                    "criterion {id}, `{}` {}",
                    check.label,
                    if known {
                        "passed but is listed as a known failure"
                    } else {
                        "failed"
                    }
                ));
            }
        }
    }
    println!("{passed}/10 criteria passed");
    for (id, label, why) in KNOWN_FAILURES {
        println!("known failure: criterion {id}, `{label}` ({why})");
    }
    if !unexpected.is_empty() {
        for u in &unexpected {
            eprintln!("unexpected: {u}");
        }
        std::process::exit(1);
    }
}
