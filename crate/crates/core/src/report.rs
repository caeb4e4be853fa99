//! Command reports shared by the binary and the examples.
//!
//! Each command returns a [`Report`] holding a JSON result object and the
//! equivalent human-readable lines.

use std::fmt::Write as _;

use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::eps::{default_eps, EpsError};
use crate::fan::{build_graph_fan_with_order, FanError, SubdivisionOrder};
use crate::graph::{connected_graphs, parse_edge_list, parse_graph, Graph, GraphError};
use crate::linear::{feasible, FeasibilityError};
use crate::moduli::{
    chain_shape_check, divisor_tube_correspondence, enumerate_stable_trees, nodal_divisors,
    tree_counts, ModuliError,
};
use crate::obstruction::{find_obstruction, w1w2_system, ObstructionError, ObstructionWitness};
use crate::tubing::{verify_fan_tubing_bijection, TubingError};
use crate::weights::{check_w1_w2, remark_weights, WeightError, WeightVector};

/// Largest `m` accepted by `verify --all-up-to`.
pub const MAX_SWEEP_VERTICES: usize = 7;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Eps(#[from] EpsError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Obstruction(#[from] ObstructionError),
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Tubing(#[from] TubingError),
    #[error(transparent)]
    Moduli(#[from] ModuliError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    None,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub input: String,
    pub results: Value,
    pub status: Status,
    #[serde(skip)]
    pub lines: Vec<String>,
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            let _ = writeln!(out, "{line}");
        }
        if self.status != Status::None {
            let _ = writeln!(
                out,
                "status: {}",
                if self.status == Status::Pass {
                    "pass"
                } else {
                    "fail"
                }
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Parses a graph from the DSL, or from an edge-list file given as `@path`.
pub fn load_graph(spec: &str) -> Result<Graph, ReportError> {
    match spec.strip_prefix('@') {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| ReportError::Io {
                path: path.to_string(),
                message: e.to_string(),
            })?;
            Ok(parse_edge_list(&text)?)
        }
        None => Ok(parse_graph(spec)?),
    }
}

/// `n:u-v,u-v,...`
pub fn describe(g: &Graph) -> String {
    let edges: Vec<String> = g.edges().map(|(u, v)| format!("{u}-{v}")).collect();
    format!("{}:{}", g.num_vertices(), edges.join(","))
}

fn witness_text(w: &ObstructionWitness) -> String {
    match w {
        ObstructionWitness::A {
            non_tube,
            inner_tube,
        } => format!("obstruction A: non-tube {non_tube} contains tube {inner_tube}"),
        ObstructionWitness::B {
            subset,
            tube_partition,
            nontube_partition,
        } => {
            let join = |blocks: &[crate::graph::VertexSet]| {
                blocks
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            format!(
                "obstruction B: {subset} splits into {} tubes {} and {} non-tubes {}",
                tube_partition.len(),
                join(tube_partition),
                nontube_partition.len(),
                join(nontube_partition)
            )
        }
    }
}

fn instantiate(w: &WeightVector, eps: &BigRational) -> Result<Vec<String>, ReportError> {
    w.entries()
        .iter()
        .map(|c| Ok(c.instantiate(eps)?.to_string()))
        .collect()
}

pub fn cmd_classify(spec: &str, eps: Option<&BigRational>) -> Result<Report, ReportError> {
    let g = load_graph(spec)?;
    g.check_supported()?;
    let mut lines = Vec::new();
    let results = match g.classify_iterated_cone() {
        Some(cs) => {
            let w = remark_weights(&g, &cs)?;
            let eps = eps.cloned().unwrap_or_else(|| default_eps(w.n(), cs.k()));
            let at_eps = instantiate(&w, &eps)?;
            let valid = w.is_valid().is_valid();
            lines.push(format!(
                "{spec}: iterated cone over a discrete set (k = {}, cone vertices: {})",
                cs.k(),
                cs.num_cones()
            ));
            lines.push(format!("independent vertices: {}", cs.independent));
            lines.push(format!("cone vertices: {}", cs.cone_vertices));
            lines.push(format!("weights: ({w})"));
            lines.push(format!("at eps = {eps}: ({})", at_eps.join(", ")));
            if !valid {
                lines.push("these weights are not a valid weight vector (total at most 2)".into());
            }
            json!({
                "iterated_cone": true,
                "k": cs.k(),
                "num_cones": cs.num_cones(),
                "independent": cs.independent,
                "cone_vertices": cs.cone_vertices,
                "weights": w.to_string(),
                "weights_valid": valid,
                "eps": eps.to_string(),
                "weights_at_eps": at_eps,
            })
        }
        None => {
            let witness = find_obstruction(&g)?;
            lines.push(format!("{spec}: not an iterated cone over a discrete set"));
            match &witness {
                Some(w) => lines.push(witness_text(w)),
                None => lines.push("no obstruction A or B found".into()),
            }
            json!({
                "iterated_cone": false,
                "obstruction": witness,
            })
        }
    };
    Ok(Report {
        command: "classify".into(),
        input: spec.into(),
        results,
        status: Status::None,
        lines,
    })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FanOptions {
    pub f_vector: bool,
    pub full: bool,
    pub seed: Option<u64>,
}

pub fn cmd_fan(spec: &str, opts: FanOptions) -> Result<Report, ReportError> {
    let g = load_graph(spec)?;
    let order = opts
        .seed
        .map_or(SubdivisionOrder::Canonical, SubdivisionOrder::Shuffled);
    let fan = build_graph_fan_with_order(&g, order)?;
    let smooth = fan.is_smooth();
    let complete = fan.is_complete();
    let mut lines = vec![
        format!("{spec}: fan of dimension {}", fan.dim()),
        format!("rays: {}", fan.num_rays()),
        format!("maximal cones: {}", fan.num_max_cones()),
    ];
    let mut results = json!({
        "dim": fan.dim(),
        "rays": fan.num_rays(),
        "max_cones": fan.num_max_cones(),
        "smooth": smooth,
        "complete": complete,
    });
    if opts.f_vector {
        let f = fan.f_vector();
        let parts: Vec<String> = f.iter().map(ToString::to_string).collect();
        lines.push(format!("f-vector: ({})", parts.join(", ")));
        results["f_vector"] = json!(f);
    }
    lines.push(format!("smooth: {smooth}"));
    lines.push(format!("complete: {complete}"));
    if opts.full {
        let text = fan.canonical_form().to_text();
        lines.extend(text.lines().map(str::to_string));
        results["fan"] = serde_json::to_value(&fan).expect("fan serializes");
    }
    Ok(Report {
        command: "fan".into(),
        input: spec.into(),
        results,
        status: if smooth && complete {
            Status::Pass
        } else {
            Status::Fail
        },
        lines,
    })
}

#[derive(Debug, Clone, Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name,
        passed,
        detail: detail.into(),
    }
}

fn verify_graph(g: &Graph) -> Result<Vec<Check>, ReportError> {
    g.check_supported()?;
    let mut checks = Vec::new();
    if g.num_vertices() >= 2 {
        let fan = build_graph_fan_with_order(g, SubdivisionOrder::Canonical)?;
        checks.push(check(
            "fan_smooth_complete",
            fan.is_smooth() && fan.is_complete(),
            format!(
                "{} rays, {} maximal cones",
                fan.num_rays(),
                fan.num_max_cones()
            ),
        ));
        if g.is_connected() {
            let b = verify_fan_tubing_bijection(g)?;
            let detail = match &b.failure {
                None => format!("counts {:?}", b.counts),
                Some(f) => serde_json::to_string(f).expect("failure serializes"),
            };
            checks.push(check("fan_tubing_bijection", b.passed(), detail));
        }
    }
    let cone = g.classify_iterated_cone();
    if g.is_connected() && g.num_vertices() >= 2 {
        let ws = w1w2_system(g);
        let point = feasible(&ws.system)?;
        let witness = find_obstruction(g)?;
        let agree = point.is_some() == cone.is_some() && witness.is_some() == point.is_none();
        checks.push(check(
            "obstruction_feasibility_agree",
            agree,
            format!(
                "feasible: {}, iterated cone: {}, obstruction: {}",
                point.is_some(),
                cone.is_some(),
                witness
                    .as_ref()
                    .map_or("none".to_string(), |w| w.kind().to_string())
            ),
        ));
        if let Some(cs) = &cone {
            let w = remark_weights(g, cs)?;
            let valid = w.is_valid().is_valid();
            let w1w2 = check_w1_w2(g, &w)?.passed();
            checks.push(check("explicit_weights", valid && w1w2, format!("({w})")));
            let report = divisor_tube_correspondence(g, &w)?;
            checks.push(check(
                "divisor_tube_correspondence",
                report.passed(),
                format!(
                    "rays {} = divisors {} + k {}",
                    report.rays, report.nodal_divisors, report.k
                ),
            ));
        }
    }
    Ok(checks)
}

pub enum VerifyTarget<'a> {
    Graph(&'a str),
    AllUpTo(usize),
}

pub fn cmd_verify(target: VerifyTarget<'_>) -> Result<Report, ReportError> {
    let mut lines = Vec::new();
    let (input, results, passed) = match target {
        VerifyTarget::Graph(spec) => {
            let g = load_graph(spec)?;
            let checks = verify_graph(&g)?;
            for c in &checks {
                lines.push(format!(
                    "{} {}: {}",
                    if c.passed { "ok  " } else { "FAIL" },
                    c.name,
                    c.detail
                ));
            }
            let passed = checks.iter().all(|c| c.passed);
            (spec.to_string(), json!({ "checks": checks }), passed)
        }
        VerifyTarget::AllUpTo(m) => {
            if !(2..=MAX_SWEEP_VERTICES).contains(&m) {
                return Err(ReportError::Usage(format!(
                    "--all-up-to must be between 2 and {MAX_SWEEP_VERTICES}"
                )));
            }
            let mut graphs = 0;
            let mut failures = Vec::new();
            for n in 2..=m {
                let level = connected_graphs(n)?;
                lines.push(format!("{n} vertices: {} connected graphs", level.len()));
                for g in level {
                    graphs += 1;
                    for c in verify_graph(&g)? {
                        if !c.passed {
                            lines.push(format!("FAIL {} {}: {}", describe(&g), c.name, c.detail));
                            failures.push(json!({ "graph": describe(&g), "check": c }));
                        }
                    }
                }
            }
            lines.push(format!(
                "{graphs} graphs checked, {} failures",
                failures.len()
            ));
            let passed = failures.is_empty();
            (
                format!("--all-up-to {m}"),
                json!({ "graphs": graphs, "failures": failures }),
                passed,
            )
        }
    };
    Ok(Report {
        command: "verify".into(),
        input,
        results,
        status: if passed { Status::Pass } else { Status::Fail },
        lines,
    })
}

pub enum WeightSource<'a> {
    Graph(&'a str),
    Weights(&'a str),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ModuliOptions {
    pub max_vertices: Option<usize>,
    pub divisors: bool,
}

pub fn cmd_moduli(
    source: WeightSource<'_>,
    opts: ModuliOptions,
    eps: Option<&BigRational>,
) -> Result<Report, ReportError> {
    let (input, w) = match source {
        WeightSource::Graph(spec) => {
            let g = load_graph(spec)?;
            let cs = g.classify_iterated_cone().ok_or_else(|| {
                ReportError::Usage(format!(
                    "{spec} is not an iterated cone over a discrete set"
                ))
            })?;
            (spec.to_string(), remark_weights(&g, &cs)?)
        }
        WeightSource::Weights(text) => (text.to_string(), text.parse::<WeightVector>()?),
    };
    let n = w.n();
    let max_vertices = opts.max_vertices.unwrap_or(n - 2);
    let trees = enumerate_stable_trees(&w, max_vertices)?;
    let counts = tree_counts(&trees);
    let max_components = counts.len();
    let mut lines = vec![format!("weights: ({w})")];
    if let Some(eps) = eps {
        lines.push(format!(
            "at eps = {eps}: ({})",
            instantiate(&w, eps)?.join(", ")
        ));
    }
    let by_size: Vec<String> = counts
        .iter()
        .enumerate()
        .map(|(i, c)| format!("{}:{c}", i + 1))
        .collect();
    lines.push(format!(
        "stable trees with at most {max_vertices} components: {} ({})",
        trees.len(),
        by_size.join(" ")
    ));
    lines.push(format!("max components: {max_components}"));
    let mut results = json!({
        "weights": w.to_string(),
        "marks": n,
        "max_vertices": max_vertices,
        "tree_counts": counts,
        "max_components": max_components,
        "trees": trees,
    });
    if max_vertices == n - 2 {
        let chain = chain_shape_check(&w)?;
        lines.push(format!(
            "all trees are chains with the heaviest marks at the ends: {chain}"
        ));
        results["chain_shaped"] = json!(chain);
    }
    if opts.divisors {
        let divisors = nodal_divisors(&w)?;
        lines.push(format!("nodal divisors: {}", divisors.len()));
        for d in &divisors {
            lines.push(format!("  {d}"));
        }
        results["nodal_divisors"] = json!(divisors);
    }
    Ok(Report {
        command: "moduli".into(),
        input,
        results,
        status: Status::None,
        lines,
    })
}
