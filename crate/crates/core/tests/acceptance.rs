//! Standalone acceptance run: prints one PASS/FAIL line per criterion and
//! exits nonzero when any criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::process::ExitCode;
use std::time::Instant;

use mlqsp_core::cost::{estimate, CostMethod, CostParams};
use mlqsp_core::filter::{build_heaviside_fourier, FourierFilter};
use mlqsp_core::pipeline::{
    counter_width, inject_oracle_error, run_multilevel_coherent, run_multilevel_measured, run_standard_qsp,
    CounterRegister, MultilevelPlan,
};
use mlqsp_core::qsp::{golden_phase_table, qetu_circuit, qetu_response, PhaseConvention, PhaseFactorSet, Su2};
use mlqsp_core::spectral::{FastForwardModel, InitialState, Regime, SpectralHamiltonian};
use mlqsp_core::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

// Independent 2x2 oracle: U = e^{i p0 Z} prod_j W(x) e^{i pj Z}, W = e^{i arccos(x) X}.
type M2 = [[Complex64; 2]; 2];

fn mul(a: &M2, b: &M2) -> M2 {
    let mut c = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn cis(a: f64) -> Complex64 {
    Complex64::new(a.cos(), a.sin())
}

fn rz(p: f64) -> M2 {
    let z = Complex64::new(0.0, 0.0);
    [[cis(p), z], [z, cis(-p)]]
}

fn w(x: f64) -> M2 {
    let s = Complex64::new(0.0, (1.0 - x * x).max(0.0).sqrt());
    let c = Complex64::new(x, 0.0);
    [[c, s], [s, c]]
}

/// QETU-table phases to the Z-rotation convention: shift the ends by pi/4 and
/// the interior by pi/2.
fn to_z_convention(qetu: &[f64]) -> Vec<f64> {
    let d = qetu.len() - 1;
    qetu.iter()
        .enumerate()
        .map(|(j, p)| {
            if d == 0 {
                *p
            } else if j == 0 || j == d {
                p - FRAC_PI_4
            } else {
                p - FRAC_PI_2
            }
        })
        .collect()
}

fn oracle_matrix(qetu: &[f64], x: f64) -> M2 {
    let z = to_z_convention(qetu);
    let mut u = rz(z[0]);
    for p in &z[1..] {
        u = mul(&mul(&u, &w(x)), &rz(*p));
    }
    u
}

fn oracle_g(qetu: &[f64], x: f64) -> f64 {
    oracle_matrix(qetu, x)[0][0].re
}

fn defect(u: &M2) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..2 {
        for j in 0..2 {
            let v = u[i][0] * u[j][0].conj() + u[i][1] * u[j][1].conj();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - target).norm_sqr().sqrt());
        }
    }
    worst
}

fn grid(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1) as f64)
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn r_squared(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(u, v)| (v - a - b * u).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    (a, b, 1.0 - ss_res / ss_tot)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn golden_table() -> Outcome {
    let phases = golden_phase_table();
    let q = phases.phases();
    let pass = grid((PI / 8.0).cos(), 1.0, 10_000).map(|x| (oracle_g(q, x) - 1.0).abs()).fold(0.0, f64::max);
    let stop = grid(0.0, FRAC_PI_4.cos(), 10_000).map(|x| oracle_g(q, x).abs()).fold(0.0, f64::max);
    let err = pass.max(stop);
    check((err - 0.01333).abs() <= 5e-4, format!("L-inf error {err:.6} (pass {pass:.6}, stop {stop:.6})"))
}

fn qetu_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut worst_g = 0.0_f64;
    let mut worst_u = 0.0_f64;
    for _ in 0..1000 {
        let half = 1 + (rng.next_u64() % 12) as usize;
        let h: Vec<f64> = (0..half).map(|_| (2.0 * uniform(&mut rng) - 1.0) * PI).collect();
        let set = PhaseFactorSet::from_half(&h, PhaseConvention::Qetu).map_err(|e| e.to_string())?;
        let t = 0.05 + 2.0 * uniform(&mut rng);
        let lambda = 20.0 * uniform(&mut rng);
        let x = (t * lambda / 2.0).cos();
        let oracle = oracle_matrix(set.phases(), x);
        let resp = qetu_response(&set, t, lambda);
        worst_g = worst_g.max((resp.g_val - oracle[0][0].re).abs());
        let circuit: Su2 = qetu_circuit(set.phases(), t, lambda, &[]);
        worst_g = worst_g.max((circuit.entry(0, 0).re - oracle[0][0].re).abs());
        worst_u = worst_u.max(defect(&oracle)).max(defect(&circuit.0));
    }
    check(
        worst_g <= 1e-10 && worst_u <= 1e-12,
        format!("max |g - oracle| {worst_g:.2e}, max unitarity defect {worst_u:.2e}"),
    )
}

fn fig3_setup() -> (SpectralHamiltonian, InitialState) {
    (
        SpectralHamiltonian::equally_spaced(21, 20.0, 0.5, 1.0).expect("valid spectrum"),
        InitialState::uniform(21).expect("valid state"),
    )
}

fn multilevel_end_to_end() -> Outcome {
    let (h, init) = fig3_setup();
    let plan = MultilevelPlan::new(&h, &init, 1e-2, Regime::TauCutoff).map_err(|e| e.to_string())?;
    let r = run_multilevel_measured(&h, &init, &plan, &FastForwardModel::ideal()).map_err(|e| e.to_string())?;
    let gamma = init.overlap();
    let levels = plan.levels();
    let phases = plan.level_filter().qetu_phases().ok_or("level filter has no phases")?;
    let lambda0 = h.ground_energy();
    let product: f64 = plan.times().iter().map(|t| oracle_g(&phases, (lambda0 * t / 2.0).cos())).product();
    let bound = (1.0 + plan.eps_prime()).powi(levels as i32) - 1.0;
    let tele = (1.0 - product).abs();
    check(
        r.fidelity >= 0.99 && r.ground_overlap >= gamma / 2.0 && tele <= bound,
        format!(
            "L={levels}, fidelity {:.8}, overlap {:.4} vs gamma/2 {:.4}, |1-prod g| {tele:.2e} <= {bound:.2e}",
            r.fidelity,
            r.ground_overlap,
            gamma / 2.0
        ),
    )
}

fn query_scaling() -> Outcome {
    let norms: Vec<f64> = (3..=10).map(|k| (1u32 << k) as f64).collect();
    let model = FastForwardModel::ideal();
    let mut ml = Vec::new();
    let mut st = Vec::new();
    for &hn in &norms {
        let n = hn as usize + 1;
        let h = SpectralHamiltonian::equally_spaced(n, hn, 0.5, 1.0).map_err(|e| e.to_string())?;
        let init = InitialState::with_overlap(n, 0.5).map_err(|e| e.to_string())?;
        let plan = MultilevelPlan::new(&h, &init, 1e-2, Regime::TauCutoff).map_err(|e| e.to_string())?;
        let m = run_multilevel_measured(&h, &init, &plan, &model).map_err(|e| e.to_string())?;
        let s = run_standard_qsp(&h, &init, 1e-2, &model).map_err(|e| e.to_string())?;
        ml.push(m.ledger.oracle_queries() as f64);
        st.push(s.ledger.oracle_queries() as f64);
    }
    let logs: Vec<f64> = norms.iter().map(|x| x.log2()).collect();
    let (_, b_ml, r2_ml) = r_squared(&logs, &ml);
    let (_, _, r2_st) = r_squared(&norms, &st);
    let ratio = st[st.len() - 1] / ml[ml.len() - 1];
    check(
        r2_ml >= 0.99 && b_ml > 0.0 && r2_st >= 0.99 && ratio > 20.0,
        format!(
            "multilevel R^2 {r2_ml:.4} (slope {b_ml:.1}), standard R^2 {r2_st:.4}, ratio at 1024 {ratio:.1} ({} vs {})",
            st[st.len() - 1],
            ml[ml.len() - 1]
        ),
    )
}

fn fourier_value(f: &FourierFilter, x: f64) -> Complex64 {
    f.coefficients()
        .iter()
        .zip(f.times())
        .map(|(c, t)| c * cis(-t * x))
        .sum()
}

fn lcu_filter() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (hn, gap) in [(20.0, 1.0), (40.0, 1.0), (40.0, 2.0)] {
        let eps = 1e-2;
        let mu = gap;
        let f = build_heaviside_fourier(hn, mu, gap, eps).map_err(|e| e.to_string())?;
        let mut a1 = 0.0_f64;
        let mut a2 = 0.0_f64;
        let mut a3 = 0.0_f64;
        for x in grid(0.0, hn, 10_000) {
            let v = fourier_value(&f, x);
            a3 = a3.max(v.norm_sqr().sqrt());
            if x < mu - gap / 2.0 {
                a1 = a1.max((v - 1.0).norm_sqr().sqrt());
            } else if x > mu + gap / 2.0 {
                a2 = a2.max(v.norm_sqr().sqrt());
            }
        }
        let eigs: Vec<f64> = std::iter::once(0.0).chain(grid(mu + gap / 2.0, hn, 40)).collect();
        let h = SpectralHamiltonian::new(eigs.clone(), mu, gap).map_err(|e| e.to_string())?;
        let summed = mlqsp_core::pipeline::lcu_state_sum(&f, &h);
        let agree = eigs.iter().zip(&summed).map(|(x, s)| (fourier_value(&f, *x) - s).norm_sqr().sqrt()).fold(0.0, f64::max);
        let good = a1 <= eps && a2 <= eps && a3 <= 1.0 + 1e-12 && agree <= 1e-10;
        ok &= good;
        notes.push(format!("({hn},{gap}) d={} A1 {a1:.1e} A2 {a2:.1e} A3 {a3:.6} sum {agree:.1e}", f.degree()));
    }
    let ratios: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&eps| {
            build_heaviside_fourier(20.0, 1.0, 1.0, eps).map(|f| f.one_norm() / (f.degree() as f64).log2())
        })
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let spread = ratios.iter().cloned().fold(0.0, f64::max) / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    ok &= spread <= 3.0;
    notes.push(format!("|c|_1/log2 d spread {spread:.3}"));
    check(ok, notes.join("; "))
}

fn compression_gadget() -> Outcome {
    let ident = Su2::identity();
    let flip = Su2::x_rotation(FRAC_PI_2);
    let sys = [Complex64::new(1.0, 0.0)];
    let mut patterns = 0;
    for levels in 1..=4usize {
        let stages = levels + 1;
        let width = counter_width(levels);
        for mask in 0..1u32 << stages {
            let flags: Vec<bool> = (0..stages).map(|i| mask >> i & 1 == 1).collect();
            let mut reg = CounterRegister::new(width, stages, &sys).map_err(|e| e.to_string())?;
            let mut bit = 0usize;
            for &ok in &flags {
                let want = if ok { 0 } else { 1 };
                let u = if want == bit { ident } else { flip };
                reg.apply_stage(|_| u);
                bit = want;
            }
            let dist = reg.counter_distribution();
            let reading = dist.iter().position(|p| *p > 0.5).ok_or("no dominant counter value")?;
            let expected = stages - flags.iter().filter(|&&f| f).count();
            if reading != expected || (reading == 0) != flags.iter().all(|&f| f) {
                return Err(format!("pattern {flags:?} read {reading}, expected {expected}"));
            }
            patterns += 1;
        }
    }
    let mut worst = 0.0_f64;
    for hn in [4.0, 8.0, 16.0, 20.0] {
        let n = hn as usize + 1;
        let h = SpectralHamiltonian::equally_spaced(n, hn, 0.5, 1.0).map_err(|e| e.to_string())?;
        let init = InitialState::uniform(n).map_err(|e| e.to_string())?;
        let plan = MultilevelPlan::new(&h, &init, 1e-2, Regime::TauCutoff).map_err(|e| e.to_string())?;
        let model = FastForwardModel::ideal();
        let m = run_multilevel_measured(&h, &init, &plan, &model).map_err(|e| e.to_string())?;
        let c = run_multilevel_coherent(&h, &init, &plan, &model).map_err(|e| e.to_string())?;
        let zero = c.register.component(0, 0);
        for (a, b) in m.final_state.amplitudes().iter().zip(zero) {
            worst = worst.max((a - b).norm_sqr().sqrt());
        }
    }
    check(worst <= 1e-10, format!("{patterns} patterns, counter-0 branch vs measured {worst:.2e}"))
}

fn error_propagation() -> Outcome {
    let (h, init) = fig3_setup();
    let plan = MultilevelPlan::new(&h, &init, 1e-2, Regime::TauCutoff).map_err(|e| e.to_string())?;
    let model = FastForwardModel::tau_cutoff(0.1).map_err(|e| e.to_string())?;
    let delta = 1e-6;
    let mut worst = 0.0_f64;
    let mut queries = 0;
    for seed in 0..100 {
        let (r, dev) = inject_oracle_error(&h, &init, &plan, &model, delta, seed).map_err(|e| e.to_string())?;
        queries = r.ledger.oracle_queries();
        let bound = queries as f64 * delta;
        if dev > bound {
            return Err(format!("seed {seed}: deviation {dev:.3e} > q delta {bound:.3e}"));
        }
        worst = worst.max(dev / bound);
    }
    check(
        (400..=600).contains(&queries),
        format!("q = {queries}, worst deviation / (q delta) = {worst:.3e}"),
    )
}

fn cost_limits() -> Outcome {
    let base = CostParams {
        regime: Regime::AlphaSoft,
        h_norm: 256.0,
        gap: 1.0,
        gamma: 0.5,
        eps: 1e-2,
        tau: f64::INFINITY,
        alpha: 0.0,
    };
    let zero = estimate(CostMethod::Multilevel, &base).map_err(|e| e.to_string())?;
    let tiny = estimate(CostMethod::Multilevel, &CostParams { alpha: 1e-6, ..base }).map_err(|e| e.to_string())?;
    let rel = (tiny.gate_units / zero.gate_units - 1.0).abs();
    let cutoff = |tau| {
        estimate(
            CostMethod::Multilevel,
            &CostParams {
                regime: Regime::TauCutoff,
                tau,
                ..base
            },
        )
    };
    let e1 = cutoff(1.0).map_err(|e| e.to_string())?;
    let e2 = cutoff(2.0).map_err(|e| e.to_string())?;
    let e10 = cutoff(10.0).map_err(|e| e.to_string())?;
    let same = e1.oracle_queries == e2.oracle_queries
        && e1.oracle_queries == e10.oracle_queries
        && e1.gate_units == e2.gate_units
        && e1.gate_units == e10.gate_units;
    check(
        rel <= 1e-2 && same,
        format!("soft relative change {rel:.2e}; cutoff queries {} for tau in {{1, 2, 10}}", e1.oracle_queries),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("golden phase table", golden_table),
        ("QETU identity", qetu_identity),
        ("multi-level end to end", multilevel_end_to_end),
        ("query scaling", query_scaling),
        ("LCU filter", lcu_filter),
        ("compression gadget", compression_gadget),
        ("error propagation", error_propagation),
        ("cost-model limits", cost_limits),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} [{secs:.2}s] {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} [{secs:.2}s] {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
