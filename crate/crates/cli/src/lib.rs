//! Command implementations behind the `qng` binary.
//!
//! Everything returns its output as a string so the integration tests can
//! assert byte-identical runs; `main` handles stdout/file routing, the
//! provenance sidecar, and exit codes.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qng_core::bench::{random_bench, BenchConfig};
use qng_core::entanglement::{ecs_witness_point, witness_sweep};
use qng_core::error::{Error, Result};
use qng_core::gaussian::{
    covariance, gaussian_entropy_gap, renyi2_entropy, symplectic_eigenvalues,
    thermal_entropy_difference,
};
use qng_core::measures::{
    evaluate, kurtosis_strategy, kurtosis_strategy_two_mode, n_kl, OptimizerOptions,
};
use qng_core::states::{build, StateSpec};

/// Non-Gaussianity measures of bosonic states from homodyne quadrature
/// distributions.
///
/// State specs use the grammar `family:param[...]`, e.g. `fock:2`,
/// `evencat:1.2`, `pacoh:1.0`, `oddcat:0.9`, `pnes:0.4`, `pstmsv:0.5`,
/// `ecs:1.0`, `noisy1:0.3`, `randpure:5:seed=42`, `randmixed:5:seed=7`,
/// `vacuum`, `coherent:0.8`, `sqvac:0.5`, `thermal:1.0`.
#[derive(Debug, Parser)]
#[command(name = "qng", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonOpts {
    /// Fock cutoff override (per mode); defaults to the family policy.
    #[arg(long, env = "QNG_CUTOFF")]
    pub cutoff: Option<usize>,
    /// Quadrature grid resolution (power of two).
    #[arg(long, env = "QNG_GRID_POINTS", default_value_t = 4096)]
    pub grid_points: usize,
    /// Master seed for anything stochastic.
    #[arg(long, env = "QNG_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Optimizer angular tolerance in radians.
    #[arg(long, env = "QNG_TOL", default_value_t = 1e-6)]
    pub tol: f64,
    /// Output format for commands that support both.
    #[arg(long, env = "QNG_FORMAT", default_value = "json")]
    pub format: Format,
    /// Write output here instead of stdout (a `.meta` sidecar records the
    /// timestamp and argv so the payload itself stays deterministic).
    #[arg(long, env = "QNG_OUT")]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full measure report (N_KL, N_QR, bounds, diagnostics) for one state.
    Measure {
        /// State spec, e.g. `fock:1` or `evencat:1.2`.
        spec: String,
    },
    /// Sweep a family parameter and emit one CSV row per point.
    Scan {
        /// Family name, e.g. `evencat`, `oddcat`, `fock`, `pnes`, `pstmsv`.
        #[arg(long)]
        family: String,
        /// Parameter range `lo:hi:points`.
        #[arg(long)]
        range: String,
        /// Comma-separated quantities: nkl,nqr,genoni,nhs_exact,nhs_lower,
        /// jkmax,jkmin,energy.
        #[arg(long, default_value = "nkl,nqr")]
        quantities: String,
    },
    /// Kurtosis-strategy benchmark on random states.
    RandomBench {
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Draw mixed states f|χ₁⟩⟨χ₁| + (1−f)|χ₂⟩⟨χ₂| instead of pure.
        #[arg(long)]
        mixed: bool,
        /// Also evaluate the variance-extremal candidates.
        #[arg(long)]
        variance_augmented: bool,
    },
    /// Verify the inequality suites; exits 4 if any row fails.
    BoundsCheck {
        /// `all` or one of: ordering, appendix, overlap, hs, uncertainty,
        /// renyi2.
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Entangled-coherent-state witness sweep with threshold estimate.
    Witness {
        /// γ range `lo:hi:points`.
        #[arg(long, default_value = "0.5:1.2:15")]
        range: String,
    },
}

/// What a command produced, before output routing.
pub struct RunOutput {
    pub payload: String,
    /// False only for a failed bounds-check (exit 4).
    pub ok: bool,
}

fn optimizer_options(common: &CommonOpts) -> OptimizerOptions {
    OptimizerOptions {
        grid_points: common.grid_points,
        refine_tol: common.tol,
        ..OptimizerOptions::default()
    }
}

fn parse_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let err = |m: &str| Error::ParseError(text.into(), m.into());
    if parts.len() != 3 {
        return Err(err("expected lo:hi:points"));
    }
    let lo: f64 = parts[0].parse().map_err(|_| err("bad lower bound"))?;
    let hi: f64 = parts[1].parse().map_err(|_| err("bad upper bound"))?;
    let n: usize = parts[2].parse().map_err(|_| err("bad point count"))?;
    if n < 2 || hi <= lo {
        return Err(err("need hi > lo and at least 2 points"));
    }
    Ok((0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect())
}

fn fmt(v: f64) -> String {
    format!("{v:.11e}")
}

fn provenance_line(common: &CommonOpts) -> String {
    format!(
        "# provenance: cutoff={} grid_points={} seed={} tol={:e}\n",
        common
            .cutoff
            .map(|c| c.to_string())
            .unwrap_or_else(|| "family-default".into()),
        common.grid_points,
        common.seed,
        common.tol
    )
}

pub fn run(cli: &Cli) -> Result<RunOutput> {
    let opts = optimizer_options(&cli.common);
    match &cli.command {
        Command::Measure { spec } => cmd_measure(spec, &cli.common, &opts),
        Command::Scan {
            family,
            range,
            quantities,
        } => cmd_scan(family, range, quantities, &cli.common, &opts),
        Command::RandomBench {
            n_max,
            samples,
            mixed,
            variance_augmented,
        } => cmd_random_bench(*n_max, *samples, *mixed, *variance_augmented, &cli.common, &opts),
        Command::BoundsCheck { suite } => cmd_bounds_check(suite, &cli.common, &opts),
        Command::Witness { range } => cmd_witness(range, &cli.common, &opts),
    }
}

fn cmd_measure(spec_text: &str, common: &CommonOpts, opts: &OptimizerOptions) -> Result<RunOutput> {
    let spec = StateSpec::parse(spec_text)?;
    let cutoff = common.cutoff.unwrap_or_else(|| spec.default_cutoff());
    let report = evaluate(&spec, cutoff, opts)?;
    let payload = match common.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes"),
        Format::Csv => {
            let mut s = String::from(
                "state,nkl,nqr,genoni_lower,nhs_exact,nhs_lower,overlap_ratio,overlap_bound,ur_lhs,ur_rhs,energy\n",
            );
            let opt = |v: Option<f64>| v.map(fmt).unwrap_or_default();
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                report.state,
                fmt(report.nkl),
                fmt(report.nqr),
                opt(report.genoni_lower),
                opt(report.nhs_exact),
                fmt(report.nhs_lower),
                opt(report.overlap_ratio),
                opt(report.overlap_bound),
                opt(report.ur_lhs),
                opt(report.ur_rhs),
                fmt(report.mean_photon_number),
            ));
            s
        }
    };
    Ok(RunOutput { payload, ok: true })
}

fn spec_for(family: &str, param: f64) -> Result<StateSpec> {
    let text = if family.eq_ignore_ascii_case("fock") {
        format!("fock:{}", param.round() as usize)
    } else {
        format!("{family}:{param}")
    };
    StateSpec::parse(&text)
}

fn cmd_scan(
    family: &str,
    range: &str,
    quantities: &str,
    common: &CommonOpts,
    opts: &OptimizerOptions,
) -> Result<RunOutput> {
    let params = parse_range(range)?;
    let wanted: Vec<&str> = quantities.split(',').map(|q| q.trim()).collect();
    for q in &wanted {
        if !matches!(
            *q,
            "nkl" | "nqr" | "genoni" | "nhs_exact" | "nhs_lower" | "jkmax" | "jkmin" | "energy"
        ) {
            return Err(Error::ParseError(
                q.to_string(),
                "unknown quantity (expected nkl,nqr,genoni,nhs_exact,nhs_lower,jkmax,jkmin,energy)"
                    .into(),
            ));
        }
    }
    let mut out = provenance_line(common);
    out.push_str("param");
    for q in &wanted {
        out.push(',');
        out.push_str(q);
    }
    out.push('\n');

    for &p in &params {
        let spec = spec_for(family, p)?;
        let cutoff = common.cutoff.unwrap_or_else(|| spec.default_cutoff());
        let state = build(&spec, cutoff)?;
        let mut nkl_cache: Option<f64> = None;
        let mut kurt_cache: Option<(f64, f64)> = None;
        out.push_str(&fmt(p));
        for q in &wanted {
            out.push(',');
            let v = match *q {
                "nkl" => match nkl_cache {
                    Some(v) => v,
                    None => {
                        let v = n_kl(&state, opts)?.value;
                        nkl_cache = Some(v);
                        v
                    }
                },
                "nqr" => qng_core::measures::n_qr(&state)?,
                "genoni" => qng_core::measures::genoni_lower(&state)?,
                "nhs_exact" => qng_core::measures::n_hs_exact(&state)?,
                "nhs_lower" => {
                    let nkl = match nkl_cache {
                        Some(v) => v,
                        None => {
                            let v = n_kl(&state, opts)?.value;
                            nkl_cache = Some(v);
                            v
                        }
                    };
                    qng_core::measures::n_hs_lower(nkl, state.modes())
                }
                "jkmax" | "jkmin" => {
                    let (jmax, jmin) = match kurt_cache {
                        Some(v) => v,
                        None => {
                            let v = if state.modes() == 1 {
                                let est = kurtosis_strategy(&state, false, opts)?;
                                (est.j_at_kmax, est.j_at_kmin)
                            } else {
                                let (_, _, jmax, jmin) =
                                    kurtosis_strategy_two_mode(&state, opts)?;
                                (jmax, jmin)
                            };
                            kurt_cache = Some(v);
                            v
                        }
                    };
                    if *q == "jkmax" {
                        jmax
                    } else {
                        jmin
                    }
                }
                "energy" => state.mean_photon_number(),
                _ => unreachable!(),
            };
            out.push_str(&fmt(v));
        }
        out.push('\n');
    }
    Ok(RunOutput { payload: out, ok: true })
}

fn cmd_random_bench(
    n_max: usize,
    samples: usize,
    mixed: bool,
    variance_augmented: bool,
    common: &CommonOpts,
    opts: &OptimizerOptions,
) -> Result<RunOutput> {
    if samples < 100 {
        return Err(Error::SampleSizeError {
            required: 100,
            got: samples,
        });
    }
    let cfg = BenchConfig {
        n_max,
        samples,
        seed: common.seed,
        mixed,
        variance_augmented,
    };
    let result = random_bench(&cfg, opts)?;
    Ok(RunOutput {
        payload: serde_json::to_string_pretty(&result).expect("bench serializes"),
        ok: true,
    })
}

#[derive(Serialize)]
struct BoundRow {
    suite: &'static str,
    case: String,
    lhs: f64,
    rhs: f64,
    margin: f64,
    pass: bool,
}

fn check(rows: &mut Vec<BoundRow>, suite: &'static str, case: String, lhs: f64, rhs: f64, tol: f64) {
    // convention: PASS when lhs >= rhs - tol
    rows.push(BoundRow {
        suite,
        case,
        lhs,
        rhs,
        margin: lhs - rhs,
        pass: lhs >= rhs - tol,
    });
}

fn cmd_bounds_check(suite: &str, common: &CommonOpts, opts: &OptimizerOptions) -> Result<RunOutput> {
    let all = suite == "all";
    let mut rows: Vec<BoundRow> = Vec::new();

    let catalog: Vec<StateSpec> = vec![
        StateSpec::Fock(1),
        StateSpec::Fock(2),
        StateSpec::EvenCat(0.8),
        StateSpec::EvenCat(1.5),
        StateSpec::OddCat(1.0),
        StateSpec::PhaseAveragedCoherent(1.0),
        StateSpec::NoisySinglePhoton(0.3),
        StateSpec::RandomPure { n_max: 5, seed: common.seed },
        StateSpec::RandomMixed { n_max: 5, seed: common.seed },
    ];

    if all || suite == "ordering" {
        for spec in &catalog {
            let cutoff = common.cutoff.unwrap_or_else(|| spec.default_cutoff());
            let state = build(spec, cutoff)?;
            let nkl = n_kl(&state, opts)?.value;
            let nqr = qng_core::measures::n_qr(&state)?;
            check(&mut rows, "ordering", format!("nqr>=nkl {spec}"), nqr, nkl, 1e-6);
            let genoni = qng_core::measures::genoni_lower(&state)?;
            check(&mut rows, "ordering", format!("nqr>=genoni {spec}"), nqr, genoni, 1e-6);
        }
    }
    if all || suite == "appendix" {
        let bound = (2.0f64 / std::f64::consts::E).ln();
        let mut prev = -f64::INFINITY;
        let mut monotone = true;
        for k in 0..=40 {
            let nbar = 10f64.powf(-3.0 + 7.0 * k as f64 / 40.0);
            let d = thermal_entropy_difference(nbar)?;
            monotone &= d > prev;
            prev = d;
            if k % 8 == 0 {
                check(
                    &mut rows,
                    "appendix",
                    format!("gap>=ln(2/e) nbar={nbar:.3e}"),
                    -d,
                    bound,
                    1e-9,
                );
            }
        }
        rows.push(BoundRow {
            suite: "appendix",
            case: "D(nbar) strictly monotone on log grid".into(),
            lhs: monotone as u8 as f64,
            rhs: 1.0,
            margin: 0.0,
            pass: monotone,
        });
        for spec in &catalog {
            let cutoff = common.cutoff.unwrap_or_else(|| spec.default_cutoff());
            let state = build(spec, cutoff)?;
            let nus = symplectic_eigenvalues(&covariance(&state)?)?;
            let gap = gaussian_entropy_gap(&nus)?;
            check(&mut rows, "appendix", format!("S2-S1 {spec}"), gap, bound, 1e-9);
        }
    }
    if all || suite == "overlap" {
        for spec in &catalog {
            let cutoff = common.cutoff.unwrap_or_else(|| spec.default_cutoff());
            let state = build(spec, cutoff)?;
            let nqr = qng_core::measures::n_qr(&state)?;
            let (ratio, bound) = qng_core::measures::overlap_bound(&state, nqr)?;
            check(&mut rows, "overlap", format!("ratio<=bound {spec}"), bound, ratio, 1e-6);
        }
    }
    if all || suite == "hs" {
        for spec in &catalog {
            let cutoff = common.cutoff.unwrap_or_else(|| spec.default_cutoff());
            let state = build(spec, cutoff)?;
            let nkl = n_kl(&state, opts)?.value;
            let exact = qng_core::measures::n_hs_exact(&state)?;
            let lower = qng_core::measures::n_hs_lower(nkl, 1);
            check(&mut rows, "hs", format!("exact>=lower {spec}"), exact, lower, 1e-9);
        }
    }
    if all || suite == "uncertainty" {
        for spec in &catalog {
            let cutoff = common.cutoff.unwrap_or_else(|| spec.default_cutoff());
            let state = build(spec, cutoff)?;
            let nkl = n_kl(&state, opts)?.value;
            let (lhs, rhs) = qng_core::measures::uncertainty_check(&state, nkl)?;
            check(&mut rows, "uncertainty", format!("sqrtdet>=hinv {spec}"), lhs, rhs, 1e-6);
        }
    }
    if all || suite == "renyi2" {
        for f in [0.1, 0.25, 0.4, 0.6, 0.9] {
            let state = build(&StateSpec::NoisySinglePhoton(f), 64)?;
            let s2 = renyi2_entropy(&state);
            let cov = covariance(&state)?;
            let rho_g = qng_core::gaussian::reference_gaussian_fock(&cov, 64)?;
            let s2_g = renyi2_entropy(&rho_g);
            // below f = 1/2 the reference has LOWER Rényi-2 entropy
            if f < 0.5 {
                check(&mut rows, "renyi2", format!("S2(rho)>S2(rhoG) f={f}"), s2, s2_g, -1e-9);
            } else {
                check(&mut rows, "renyi2", format!("S2(rhoG)>=S2(rho) f={f}"), s2_g, s2, 1e-9);
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::ParseError(
            suite.into(),
            "unknown suite (expected all, ordering, appendix, overlap, hs, uncertainty, renyi2)"
                .into(),
        ));
    }

    let mut payload = provenance_line(common);
    payload.push_str("suite,case,lhs,rhs,margin,result\n");
    let mut ok = true;
    for r in &rows {
        ok &= r.pass;
        payload.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.suite,
            r.case,
            fmt(r.lhs),
            fmt(r.rhs),
            fmt(r.margin),
            if r.pass { "PASS" } else { "FAIL" }
        ));
    }
    payload.push_str(&format!(
        "# {} checks, {} failed\n",
        rows.len(),
        rows.iter().filter(|r| !r.pass).count()
    ));
    Ok(RunOutput { payload, ok })
}

fn cmd_witness(range: &str, common: &CommonOpts, opts: &OptimizerOptions) -> Result<RunOutput> {
    let gammas = parse_range(range)?;
    let cutoff = common.cutoff.unwrap_or(40);
    let mut payload = provenance_line(common);
    payload.push_str(
        "gamma,lhs_h_sqrtdet,rhs_nkl,sqrt_det_mode1,sqrt_det_mode2,gaussian_ppt_detects,enhanced_detects\n",
    );
    match witness_sweep(&gammas, cutoff, opts) {
        Ok(sweep) => {
            for p in &sweep.points {
                payload.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    fmt(p.gamma_parameter),
                    fmt(p.lhs),
                    fmt(p.rhs),
                    fmt(p.sqrt_det_gamma[0]),
                    fmt(p.sqrt_det_gamma[1]),
                    p.gaussian_ppt_detects,
                    p.enhanced_detects
                ));
            }
            payload.push_str(&format!("# threshold gamma = {}\n", fmt(sweep.threshold)));
            Ok(RunOutput { payload, ok: true })
        }
        Err(Error::NoThreshold { detects }) => {
            for &g in &gammas {
                let p = ecs_witness_point(g, cutoff, opts)?;
                payload.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    fmt(p.gamma_parameter),
                    fmt(p.lhs),
                    fmt(p.rhs),
                    fmt(p.sqrt_det_gamma[0]),
                    fmt(p.sqrt_det_gamma[1]),
                    p.gaussian_ppt_detects,
                    p.enhanced_detects
                ));
            }
            payload.push_str(&format!(
                "# no threshold in range; detects everywhere = {detects}\n"
            ));
            Ok(RunOutput { payload, ok: true })
        }
        Err(e) => Err(e),
    }
}
