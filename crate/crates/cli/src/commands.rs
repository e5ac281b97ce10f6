use activation_robustness::activation::{build_activation_report_with_spread, spread_gd};
use activation_robustness::robustness::{robustness_ppt_with, witness_from_dual_with};
use activation_robustness::sdp::SolverOptions;
use activation_robustness::teleport::{mc_average_fidelity_with, teleport_report, Protocol};
use activation_robustness::verify::{run_criterion, SuiteConfig, CRITERIA};
use activation_robustness::{DensityMatrix, RobustnessResult};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::Path;
use std::time::Instant;

use crate::document::MatrixDocument;
use crate::error::CliError;

/// Slack allowed in `activationRatio <= robustness`.
pub const BOUND_SLACK: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Provenance {
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
}

impl Provenance {
    fn new() -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WitnessDocument {
    pub operator: MatrixDocument,
    pub normalization_bound: f64,
    pub value_on_target: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RobustnessResults {
    pub value: f64,
    pub relaxation: String,
    pub status: String,
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub optimal_noise: MatrixDocument,
    pub witness: WitnessDocument,
}

pub struct RobustnessOptions {
    pub tolerance: f64,
    pub restarts: usize,
    pub seed: u64,
}

fn solve_robustness(sigma: &DensityMatrix, tolerance: f64) -> Result<RobustnessResult, CliError> {
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(CliError::Input(format!("--tol: {tolerance} is not in (0, 1)")));
    }
    let opts = SolverOptions {
        tolerance,
        ..SolverOptions::default()
    };
    Ok(robustness_ppt_with(sigma, &opts)?)
}

fn robustness_results(
    sigma: &DensityMatrix,
    opts: &RobustnessOptions,
) -> Result<(RobustnessResults, usize), CliError> {
    let result = solve_robustness(sigma, opts.tolerance)?;
    let witness = witness_from_dual_with(sigma, &result, opts.restarts, opts.seed)?;
    let space = sigma.space();
    let results = RobustnessResults {
        value: result.value,
        relaxation: result.relaxation.as_str().to_string(),
        status: format!("{:?}", result.status).to_lowercase(),
        primal_value: result.certificate.primal_value,
        dual_value: result.certificate.dual_value,
        gap: result.solver_gap,
        tolerance: opts.tolerance,
        optimal_noise: MatrixDocument::from_matrix(result.optimal_noise.matrix(), space),
        witness: WitnessDocument {
            operator: MatrixDocument::from_matrix(&witness.operator, space),
            normalization_bound: witness.normalization_bound,
            value_on_target: witness.value_on_target,
        },
    };
    Ok((results, result.certificate.iterations))
}

pub fn cmd_robustness(input: &Path, opts: &RobustnessOptions) -> Result<ReportDocument, CliError> {
    let doc = MatrixDocument::read(input)?;
    let sigma = doc.to_density()?;
    let (results, iterations) = robustness_results(&sigma, opts)?;
    Ok(ReportDocument {
        command: "robustness".into(),
        inputs: json!({ "path": input, "dims": doc.dims, "tolerance": opts.tolerance }),
        results: serde_json::to_value(results).expect("plain data serializes"),
        provenance: Provenance {
            solver_iterations: Some(iterations),
            seed: Some(opts.seed),
            restarts: Some(opts.restarts),
            ..Provenance::new()
        },
    })
}

pub struct TeleportOptions {
    pub d: usize,
    pub samples: Option<usize>,
    pub seed: u64,
    pub protocol: Protocol,
}

pub fn cmd_teleport(input: &Path, opts: &TeleportOptions) -> Result<ReportDocument, CliError> {
    let doc = MatrixDocument::read(input)?;
    if doc.dims != [opts.d, opts.d] {
        return Err(CliError::Input(format!(
            "dims: expected [{d}, {d}] for d = {d}, found {:?}",
            doc.dims,
            d = opts.d
        )));
    }
    let rho = doc.to_density()?;
    let report = teleport_report(&rho, None)?;
    let monte_carlo = match opts.samples {
        Some(n) => {
            let mc = mc_average_fidelity_with(&rho, n, opts.seed, opts.protocol)?;
            Some(json!({
                "protocol": protocol_name(opts.protocol),
                "mean": mc.mean,
                "stdError": mc.std_error,
                "samples": mc.samples,
                "withinFourStdErrors": mc.agrees_with(report.teleport_fidelity, 4.0, 1e-12),
            }))
        }
        None => None,
    };
    let mut results = json!({
        "d": report.d,
        "entanglementFidelity": report.entanglement_fidelity,
        "teleportFidelity": report.teleport_fidelity,
        "classicalThreshold": report.classical_threshold,
        "beatsClassical": report.beats_classical,
    });
    if let Some(mc) = monte_carlo {
        results["monteCarlo"] = mc;
    }
    Ok(ReportDocument {
        command: "teleport".into(),
        inputs: json!({ "path": input, "d": opts.d, "samples": opts.samples }),
        results,
        provenance: Provenance {
            seed: opts.samples.map(|_| opts.seed),
            ..Provenance::new()
        },
    })
}

fn protocol_name(p: Protocol) -> &'static str {
    match p {
        Protocol::Twirled => "twirled",
        Protocol::Direct => "direct",
    }
}

pub fn cmd_activate(rho_path: &Path, sigma_path: &Path, opts: &RobustnessOptions) -> Result<ReportDocument, CliError> {
    let rho_doc = MatrixDocument::read(rho_path)?;
    let fp = rho_doc.four_party_space()?;
    let sigma_doc = MatrixDocument::read(sigma_path)?;
    if sigma_doc.dims != [fp.m, fp.m] {
        return Err(CliError::Input(format!(
            "dims: sigma must live on [{m}, {m}] to match fourParty.m = {m}, found {:?}",
            sigma_doc.dims,
            m = fp.m
        )));
    }
    let rho = rho_doc.to_density()?;
    let sigma = sigma_doc.to_density()?;

    let spread = spread_gd(&rho, fp, opts.restarts, opts.seed)?;
    let report = build_activation_report_with_spread(&rho, fp, &sigma, &spread)?;
    let (robustness, iterations) = robustness_results(&sigma, opts)?;
    let results = json!({
        "m": report.m,
        "d": report.d,
        "successProbability": report.success_probability,
        "fidelityWithSigma": report.fidelity_with_sigma,
        "fidelityFailureBranch": report.fidelity_failure_branch,
        "teleportFidelity": report.teleport_fidelity,
        "classicalThreshold": report.classical_threshold,
        "spread": report.gd,
        "activationRatio": report.activation_ratio,
        "detectionValue": report.detection_value,
        "robustness": robustness,
        "boundSlack": BOUND_SLACK,
        "ratioWithinRobustness": report.activation_ratio <= robustness.value + BOUND_SLACK,
    });
    Ok(ReportDocument {
        command: "activate".into(),
        inputs: json!({
            "rhoPath": rho_path,
            "sigmaPath": sigma_path,
            "fourParty": { "m": fp.m, "d": fp.d },
            "tolerance": opts.tolerance,
        }),
        results,
        provenance: Provenance {
            solver_iterations: Some(iterations),
            seed: Some(opts.seed),
            restarts: Some(report.spread_restarts),
            ..Provenance::new()
        },
    })
}

/// Runs the acceptance suite, printing one line per criterion to stderr.
/// Wall time goes to stderr only, so a fixed seed gives a byte-identical report.
pub fn cmd_verify(config: SuiteConfig) -> (ReportDocument, Vec<u32>) {
    let start = Instant::now();
    let mut outcomes = Vec::new();
    let mut failed = Vec::new();
    for (id, _) in CRITERIA {
        let t = Instant::now();
        let o = run_criterion(id, &config);
        eprintln!("{o} [{:.2}s]", t.elapsed().as_secs_f64());
        if !o.passed {
            failed.push(o.id);
        }
        outcomes.push(json!({
            "id": o.id,
            "name": o.name,
            "passed": o.passed,
            "measured": o.measured,
            "tolerance": o.tolerance,
            "detail": o.detail,
        }));
    }
    eprintln!("suite finished in {:.1}s", start.elapsed().as_secs_f64());
    let report = ReportDocument {
        command: "verify".into(),
        inputs: json!({ "seed": config.seed, "quick": config.quick }),
        results: json!({ "allPassed": failed.is_empty(), "failed": failed, "criteria": outcomes }),
        provenance: Provenance {
            seed: Some(config.seed),
            ..Provenance::new()
        },
    };
    (report, failed)
}
