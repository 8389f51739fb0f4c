//! Built-in acceptance criteria, shared by `qmeasure check` and the
//! `acceptance` test target.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use anyhow::{ensure, Context};
use qmeasure_core::experiments::{
    run_box_model, run_ozawa_position, run_slit_two_body, run_spin_epr, BoxModelConfig, DiffractionConfig,
    OzawaPositionConfig, PreparationConfig, ScenarioParams, Setup, SlitConfig,
};
use qmeasure_core::grid::{gaussian_packet, plane_wave, Grid1D, GridWaveFn, Interval};
use qmeasure_core::measurement::{entanglement_criterion, kennard_check};
use qmeasure_core::scaling::fit_loglog;
use qmeasure_core::two_body::{Frame, TwoBodyWaveFn};
use qmeasure_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{LogRange, Output, RunConfig, Sweep};
use crate::runner::{run_sweep, SweepResult};

pub const KENNARD_STATES: usize = 500;
pub const KENNARD_SEED: u64 = 20_240_917;

#[derive(Debug, Clone)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:>2}. {} ({:.2} s): {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

type Check = fn() -> anyhow::Result<(bool, String)>;

pub const CRITERIA: [(u8, &str, Check); 9] = [
    (1, "spin EPR exactness", spin_epr),
    (2, "Kennard suite", kennard),
    (3, "diffraction scaling", diffraction),
    (4, "evasion-probability law", evasion_probability),
    (5, "box model", box_model),
    (6, "preparation loophole closure", preparation),
    (7, "reduction consistency", reduction),
    (8, "entanglement criterion", entanglement),
    (9, "two-body slit", slit),
];

pub fn run_one(id: u8) -> Option<Criterion> {
    let &(id, title, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let (pass, detail) = match check() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e:#}")),
    };
    Some(Criterion { id, title, pass, detail, elapsed: start.elapsed() })
}

pub fn run_all() -> Vec<Criterion> {
    CRITERIA.iter().filter_map(|c| run_one(c.0)).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn value(report: &qmeasure_core::ExperimentReport, key: &str) -> anyhow::Result<f64> {
    report.value(key).with_context(|| format!("report lacks `{key}`"))
}

fn sweep_config(params: ScenarioParams, parameter: &str, points: Points, fit: &[&str]) -> RunConfig {
    let (values, range) = match points {
        Points::Values(v) => (Some(v), None),
        Points::Range(r) => (None, Some(r)),
    };
    RunConfig {
        params,
        setup: Setup::default(),
        sweep: Some(Sweep {
            parameter: parameter.into(),
            values,
            range,
            fields: Vec::new(),
            fit: fit.iter().map(|s| s.to_string()).collect(),
        }),
        output: Output::default(),
    }
}

enum Points {
    Values(Vec<f64>),
    Range(LogRange),
}

fn sweep(params: ScenarioParams, parameter: &str, points: Points, fit: &[&str]) -> anyhow::Result<SweepResult> {
    let cfg = sweep_config(params, parameter, points, fit);
    run_sweep(&cfg, cfg.sweep.as_ref().unwrap(), None)
}

fn spin_epr() -> anyhow::Result<(bool, String)> {
    let start = Instant::now();
    let r = run_spin_epr(&Setup::default())?.report;
    let errors = [
        value(&r, "eq_3_4_total_sy_norm")?,
        (value(&r, "eq_3_5_correlator")? + 0.25).abs(),
        value(&r, "eq_3_5_mean_product")?.abs(),
        value(&r, "eq_3_6_max_abs_diff")?,
        (value(&r, "eq_3_9_overlap")? - 0.5).abs(),
    ];
    let worst = errors.iter().cloned().fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    Ok((worst <= 1e-12 && secs < 1.0, format!("max deviation {worst:.1e} (tol 1e-12), {secs:.3} s (limit 1 s)")))
}

fn random_mixture(rng: &mut ChaCha8Rng, grid: Grid1D) -> anyhow::Result<GridWaveFn> {
    let count = rng.random_range(1..=4);
    let mut amps = vec![C64::new(0.0, 0.0); grid.points()];
    for _ in 0..count {
        let packet = gaussian_packet(
            grid,
            rng.random_range(-8.0..8.0),
            rng.random_range(0.3..2.0),
            rng.random_range(-3.0..3.0),
        )?;
        let c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        for (a, z) in amps.iter_mut().zip(packet.amplitudes()) {
            *a += c * z;
        }
    }
    Ok(GridWaveFn::from_amplitudes(grid, amps)?.normalized()?)
}

fn kennard() -> anyhow::Result<(bool, String)> {
    let start = Instant::now();
    let grid = Grid1D::new(4096, 80.0, 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(KENNARD_SEED);
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for _ in 0..KENNARD_STATES {
        let wf = random_mixture(&mut rng, grid)?;
        let report = kennard_check(&wf)?;
        worst = worst.min(report.product / 0.5);
        failures += usize::from(!report.pass);
    }
    let minimal = kennard_check(&gaussian_packet(grid, 0.0, 1.0, 0.0)?)?;
    let saturation = rel(minimal.product, 0.5);
    let secs = start.elapsed().as_secs_f64();
    let pass = failures == 0 && worst >= 1.0 - 1e-3 && saturation < 1e-6 && secs < 10.0;
    Ok((
        pass,
        format!(
            "{KENNARD_STATES} mixtures, min product/(hbar/2) = {worst:.6}, minimal Gaussian off by {saturation:.1e}, {secs:.2} s"
        ),
    ))
}

fn diffraction() -> anyhow::Result<(bool, String)> {
    let range = Points::Range(LogRange { start: 1e3, stop: 1e6, points: 7, log: true });
    let result = sweep(
        ScenarioParams::Diffraction(DiffractionConfig::default()),
        "screen_distance",
        range,
        &["eq_2_3_product", "eq_2_10_ring_probability"],
    )?;
    let product = result.fits["eq_2_3_product"].slope;
    let ring = result.fits["eq_2_10_ring_probability"].slope;
    let mut compared = 0;
    let mut worst: f64 = 0.0;
    for row in &result.rows {
        if row.report.flags.get("far_field_regime") == Some(&true) {
            if let Some(d) = row.report.value("grid_farfield_relative_difference") {
                compared += 1;
                worst = worst.max(d);
            }
        }
    }
    let pass = (product + 1.0).abs() <= 0.02 && (ring + 2.0).abs() <= 0.05 && compared > 0 && worst <= 0.05;
    Ok((
        pass,
        format!(
            "product slope {product:.5} (-1 +/- 0.02), ring slope {ring:.5} (-2 +/- 0.05), grid vs far field {worst:.2e} over {compared} far-field points (tol 5%)"
        ),
    ))
}

fn evasion_probability() -> anyhow::Result<(bool, String)> {
    let cfg = OzawaPositionConfig { monte_carlo_samples: 100_000, ..Default::default() };
    let r = run_ozawa_position(&cfg, &Setup::default())?.report;
    let expected = cfg.width / (2.0 * cfg.length);
    let p = value(&r, "eq_2_16_sector_probability")?;
    let z = value(&r, "mc_z_score")?;
    let product = value(&r, "eq_2_13_product")?;
    let flagged = r.evasion.iter().any(|e| e.label == "eq_2_13_product" && e.evasion);
    let eps = value(&r, "eq_2_14_epsilon_x1")?;
    let box_eps = cfg.length / 3f64.sqrt();
    let pass = rel(p, expected) <= 1e-6 && z.abs() <= 3.0 && product == 0.0 && flagged && rel(eps, box_eps) <= 0.05;
    Ok((
        pass,
        format!(
            "p = {p:.6e} vs alpha/2L = {expected:.6e} (rel {:.1e}), MC z = {z:.3}, conditioned product {product}, evasion flag {flagged}, eps/(L/sqrt3) = {:.4}",
            rel(p, expected),
            eps / box_eps
        ),
    ))
}

fn box_model() -> anyhow::Result<(bool, String)> {
    let cfg = BoxModelConfig::default();
    let r = run_box_model(&cfg, &Setup::default())?.report;
    let unconditioned = value(&r, "eq_2_25_product")?;
    let bound = value(&r, "eq_2_27_product_bound")?;
    let closed_form = 2.0 * cfg.width * PI / cfg.length;
    let computed = value(&r, "eq_2_27_product")?;
    // The box must hold a whole number of packets.
    let range = Points::Values(vec![100.0, 300.0, 1000.0, 3000.0, 10_000.0]);
    let result = sweep(ScenarioParams::BoxModel(cfg), "length", range, &["eq_2_27_product", "eq_2_27_product_bound"])?;
    let slope = result.fits["eq_2_27_product"].slope;
    let bound_slope = result.fits["eq_2_27_product_bound"].slope;
    let band = (0.5 * PI..=4.0 * PI).contains(&unconditioned);
    let pass = band
        && rel(bound, closed_form) <= 1e-6
        && computed <= bound * (1.0 + 1e-9)
        && (slope + 1.0).abs() <= 0.02
        && (bound_slope + 1.0).abs() <= 0.02;
    Ok((
        pass,
        format!(
            "unconditioned {unconditioned:.4} in [pi/2, 4pi]: {band}; conditioned alpha*dP = {bound:.6e} vs 2*alpha*pi/L (rel {:.1e}); computed eps*dP = {computed:.4e} <= bound; slope {slope:.5} (-1 +/- 0.02)",
            rel(bound, closed_form)
        ),
    ))
}

fn preparation() -> anyhow::Result<(bool, String)> {
    let range = || Points::Range(LogRange { start: 0.01, stop: 1.0, points: 5, log: true });
    let params = ScenarioParams::Preparation(PreparationConfig::default());
    let first = sweep(params.clone(), "width", range(), &[])?;
    let second = sweep(params, "partner_width", range(), &[])?;
    let mut worst: f64 = 0.0;
    let mut lowest = f64::INFINITY;
    let mut flagged = false;
    for (result, field) in [(&first, "eq_2_36_product"), (&second, "eq_2_37_product")] {
        for row in &result.rows {
            let p = value(&row.report, field)?;
            worst = worst.max(rel(p, 0.5));
            lowest = lowest.min(p);
            flagged |= row.report.flags.iter().any(|(k, v)| k.ends_with("evasion") && *v);
        }
    }
    let pass = worst <= 0.02 && lowest >= 0.5 * 0.98 && !flagged;
    Ok((
        pass,
        format!("10 points over alpha in [0.01, 1]: max |product/(hbar/2) - 1| = {worst:.2e} (tol 2%), min product {lowest:.6}, any evasion flag {flagged}"),
    ))
}

fn reduction() -> anyhow::Result<(bool, String)> {
    let grid = Grid1D::new(4096, 400.0, 1.0)?;
    let wf = plane_wave(grid, 8.0 * grid.momentum_spacing())?;
    let mut lowest = f64::INFINITY;
    for cells in [8.0, 16.0, 32.0, 64.0, 128.0] {
        let width = cells * grid.spacing();
        let (reduced, _) = wf.reduce(Interval::around(0.0, width))?;
        lowest = lowest.min(reduced.std_momentum() * width / 0.5);
    }
    Ok((lowest >= 1.0 - 1e-3, format!("min dp*dy/(hbar/2) = {lowest:.4} over 8..128 grid spacings")))
}

fn entanglement() -> anyhow::Result<(bool, String)> {
    let grid = Grid1D::new(512, 40.0, 1.0)?;
    let sigma = 0.5f64.sqrt();
    let product = TwoBodyWaveFn::product(
        Frame::Particles,
        gaussian_packet(grid, 1.0, sigma, 0.0)?,
        gaussian_packet(grid, -1.0, sigma, 0.0)?,
    )?;
    let boundary = entanglement_criterion(&product);
    let r = 1.0f64;
    let squeezed = TwoBodyWaveFn::from_fn(Frame::Particles, grid, grid, |x1, x2| {
        let (u, v) = (x1 - x2, x1 + x2);
        C64::new((-u * u * (2.0 * r).exp() / 4.0 - v * v * (-2.0 * r).exp() / 4.0).exp(), 0.0)
    })?;
    let report = entanglement_criterion(&squeezed);
    let expected = 2.0 * (-2.0 * r).exp();
    let pass = (boundary.sum - 2.0).abs() <= 1e-9
        && !boundary.entangled
        && (report.sum - expected).abs() <= 1e-6
        && report.entangled;
    Ok((
        pass,
        format!(
            "product sum - 2hbar = {:.1e}; squeezed sum {:.8} vs 2e^-2 = {expected:.8}, entangled {}",
            boundary.sum - 2.0,
            report.sum,
            report.entangled
        ),
    ))
}

fn slit() -> anyhow::Result<(bool, String)> {
    let r = run_slit_two_body(&SlitConfig::default(), &Setup::default())?.report;
    let total = value(&r, "total_momentum_drift")?;
    let relative = value(&r, "relative_momentum_drift")?;
    let py = value(&r, "eq_2_31_product_y")?;
    let px = value(&r, "eq_2_31_product_x")?;
    let result = sweep(
        ScenarioParams::SlitTwoBody(SlitConfig::default()),
        "diffraction.screen_distance",
        Points::Range(LogRange { start: 1e3, stop: 6.4e4, points: 4, log: true }),
        &[],
    )?;
    let points = result
        .rows
        .iter()
        .map(|row| Ok((value(&row.report, "l_tilde")?, value(&row.report, "eq_2_34_sector_probability")?)))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let fit = fit_loglog(&points)?;
    ensure!(result.rows.len() == 4, "sweep lost points");
    let pass = total <= 1e-8 && relative <= 1e-8 && py == 0.0 && px == 0.0 && (fit.slope + 1.0).abs() <= 0.05;
    Ok((
        pass,
        format!(
            "momentum drift {total:.1e} / {relative:.1e} (tol 1e-8), conditioned products {py} and {px}, probability vs l_tilde slope {:.5} (-1 +/- 0.05)",
            fit.slope
        ),
    ))
}
