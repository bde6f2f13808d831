//! Execution of each subcommand from a resolved parameter map. Commands
//! return in-memory artifacts; the caller writes files and the manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::json;
use sog_lab::cascade::{
    build_discrete_tree, build_pwit, collapse, convergence_test, tree_w_tilde,
    wgg_heaviest_from_root,
};
use sog_lab::estimators::{
    clt_diagnostic, estimate_clt_variance_with, estimate_growth_constant, EstimateParams, Method,
};
use sog_lab::fixedpoint::{mc_validate_ftw, solve_ftw};
use sog_lab::heaviest::heaviest_between;
use sog_lab::par::run_replications;
use sog_lab::regen::{detect_skeleton, estimate_lambda, skeleton_density, WindowParams};
use sog_lab::stream::role;
use sog_lab::{DistributionSpec, GenerationMode, GraphWindow, Variant};

use crate::CliError;

pub struct Artifact {
    /// Appended to the output prefix as `{prefix}.{suffix}`.
    pub suffix: &'static str,
    pub content: String,
}

fn json_artifact<T: Serialize>(suffix: &'static str, value: &T) -> Result<Artifact, CliError> {
    let mut content = serde_json::to_string_pretty(value).map_err(sog_lab::Error::from)?;
    content.push('\n');
    Ok(Artifact { suffix, content })
}

type Params = BTreeMap<String, String>;

fn get<'a>(p: &'a Params, key: &str) -> Result<&'a str, CliError> {
    p.get(key)
        .map(String::as_str)
        .ok_or_else(|| CliError::Usage(format!("missing parameter `{key}`")))
}

fn parse<T: std::str::FromStr>(p: &Params, key: &str, what: &str) -> Result<T, CliError> {
    let raw = get(p, key)?;
    raw.parse()
        .map_err(|_| CliError::Usage(format!("parameter `{key}`: expected {what}, got `{raw}`")))
}

fn parse_opt<T: std::str::FromStr>(
    p: &Params,
    key: &str,
    what: &str,
) -> Result<Option<T>, CliError> {
    match p.get(key) {
        None => Ok(None),
        Some(_) => parse(p, key, what).map(Some),
    }
}

fn dist(p: &Params, key: &str) -> Result<DistributionSpec, CliError> {
    get(p, key)?.parse::<DistributionSpec>().map_err(CliError::Lib)
}

fn usize_list(p: &Params, key: &str) -> Result<Vec<usize>, CliError> {
    get(p, key)?
        .split(',')
        .map(|s| {
            s.trim().parse().map_err(|_| {
                CliError::Usage(format!("parameter `{key}`: expected comma-separated integers"))
            })
        })
        .collect()
}

fn checkpoint_list(p: &Params, key: &str) -> Result<Vec<(f64, f64)>, CliError> {
    get(p, key)?
        .split(',')
        .map(|s| {
            s.trim()
                .split_once(':')
                .and_then(|(t, w)| Some((t.trim().parse().ok()?, w.trim().parse().ok()?)))
                .ok_or_else(|| {
                    CliError::Usage(format!(
                        "parameter `{key}`: expected comma-separated t:w pairs, e.g. 1:0.5,1:1.5"
                    ))
                })
        })
        .collect()
}

fn mode(p: &Params) -> Result<GenerationMode, CliError> {
    match get(p, "mode")? {
        "sparse" => Ok(GenerationMode::Sparse),
        "dense" => Ok(GenerationMode::Dense),
        other => Err(CliError::Usage(format!(
            "parameter `mode`: expected sparse or dense, got `{other}`"
        ))),
    }
}

fn window(p: &Params) -> Result<GraphWindow, CliError> {
    GraphWindow::generate(
        parse(p, "n", "a positive integer")?,
        parse(p, "p", "a number")?,
        &dist(p, "u")?,
        &dist(p, "v")?,
        parse(p, "seed", "an unsigned integer")?,
        mode(p)?,
    )
    .map_err(CliError::Lib)
}

fn estimate_params(p: &Params) -> Result<EstimateParams, CliError> {
    Ok(EstimateParams {
        n: parse(p, "n", "a positive integer")?,
        p: parse(p, "p", "a number")?,
        du: dist(p, "u")?,
        dv: dist(p, "v")?,
        c: parse_opt(p, "c", "a number")?,
        reps: parse(p, "reps", "a positive integer")?,
        margin: parse(p, "margin", "a nonnegative integer")?,
        seed: parse(p, "seed", "an unsigned integer")?,
    })
}

pub fn execute(name: &str, p: &Params) -> Result<Vec<Artifact>, CliError> {
    match name {
        "generate" => Ok(vec![json_artifact("window.json", &window(p)?.to_doc())?]),
        "heaviest" => {
            let w = window(p)?;
            let variant = match get(p, "variant")? {
                "full" => Variant::Full,
                "edge_only" => Variant::EdgeOnly,
                other => {
                    return Err(CliError::Usage(format!(
                        "parameter `variant`: expected full or edge_only, got `{other}`"
                    )))
                }
            };
            let i: usize = parse(p, "i", "a vertex index")?;
            let j: usize = parse(p, "j", "a vertex index")?;
            let pv = heaviest_between(&w, i, j, variant)?;
            Ok(vec![json_artifact("json", &pv)?])
        }
        "skeleton" => {
            let wp = WindowParams {
                n: parse(p, "n", "a positive integer")?,
                p: parse(p, "p", "a number")?,
                du: dist(p, "u")?,
                dv: dist(p, "v")?,
                seed: parse(p, "seed", "an unsigned integer")?,
            };
            let margin: usize = parse(p, "margin", "a nonnegative integer")?;
            let reps: usize = parse(p, "reps", "a positive integer")?;
            if 2 * margin >= wp.n {
                return Err(CliError::Usage("parameter `margin`: 2*margin must be < n".into()));
            }
            let band = (wp.n - 2 * margin + 1) as f64;
            let w0 = wp.replicate(role::REPLICATION, 0)?;
            detect_skeleton(&w0, margin)?;
            let fracs = run_replications(reps, |r| {
                let w = wp.replicate(role::REPLICATION, r).expect("validated params");
                let rep = detect_skeleton(&w, margin).expect("validated margin");
                rep.points.len() as f64 / band
            });
            let (estimate, stderr) = sog_lab::stats::mean_stderr(&fracs);
            let doc = json!({
                "target": "gamma",
                "n": wp.n, "p": wp.p, "margin": margin, "reps": reps, "seed": wp.seed,
                "estimate": estimate,
                "stderr": stderr,
                "series_value": skeleton_density(wp.p, 1e-12)?,
            });
            Ok(vec![json_artifact("json", &doc)?])
        }
        "renewal" => {
            let wp = WindowParams {
                n: parse(p, "n", "a positive integer")?,
                p: parse(p, "p", "a number")?,
                du: dist(p, "u")?,
                dv: dist(p, "v")?,
                seed: parse(p, "seed", "an unsigned integer")?,
            };
            let c: f64 = parse(p, "c", "a number")?;
            let reps: usize = parse(p, "reps", "a positive integer")?;
            let est = estimate_lambda(&wp, c, reps)?;
            let doc = json!({
                "target": "lambda",
                "n": wp.n, "p": wp.p, "c": c, "reps": est.reps, "seed": wp.seed,
                "estimate": est.estimate,
                "stderr": est.stderr,
            });
            Ok(vec![json_artifact("json", &doc)?])
        }
        "estimate-c" => {
            let method = match get(p, "method")? {
                "plug_in" => Method::PlugIn,
                "regenerative" => Method::Regenerative,
                other => {
                    return Err(CliError::Usage(format!(
                        "parameter `method`: expected plug_in or regenerative, got `{other}`"
                    )))
                }
            };
            let report = estimate_growth_constant(&estimate_params(p)?, method)?;
            Ok(vec![json_artifact("json", &report)?])
        }
        "estimate-b2" => {
            let bootstrap: usize = parse(p, "bootstrap", "a positive integer")?;
            let report = estimate_clt_variance_with(&estimate_params(p)?, bootstrap)?;
            Ok(vec![json_artifact("json", &report)?])
        }
        "clt" => {
            let rows = clt_diagnostic(
                &usize_list(p, "n-grid")?,
                parse(p, "p", "a number")?,
                &dist(p, "u")?,
                &dist(p, "v")?,
                parse(p, "reps", "a positive integer")?,
                parse(p, "seed", "an unsigned integer")?,
            )?;
            let mut csv = String::from("n,reps,degenerate,skewness,excess_kurtosis,ks_normal\n");
            let cell = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
            for r in rows {
                writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    r.n,
                    r.reps,
                    r.degenerate,
                    cell(r.skewness),
                    cell(r.excess_kurtosis),
                    cell(r.ks_normal)
                )
                .expect("string write");
            }
            Ok(vec![Artifact { suffix: "csv", content: csv }])
        }
        "cascade" => {
            let du = dist(p, "u")?;
            let dv = dist(p, "v")?;
            let horizon: f64 = parse(p, "horizon", "a number")?;
            let seed: u64 = parse(p, "seed", "an unsigned integer")?;
            let n: Option<usize> = parse_opt(p, "n", "a positive integer")?;
            let p_n: Option<f64> = parse_opt(p, "p-n", "a number")?;
            let tree = match (n, p_n) {
                (Some(n), Some(p_n)) => build_discrete_tree(n, p_n, &du, &dv, horizon, seed)?,
                (None, None) => build_pwit(&du, &dv, horizon, seed)?,
                _ => {
                    return Err(CliError::Usage(
                        "the discrete flavor needs both `n` and `p-n`".into(),
                    ))
                }
            };
            let wgg = collapse(&tree);
            let doc = json!({
                "wgg": wgg,
                "w_tilde": tree_w_tilde(&tree),
                "heaviest_from_root": wgg_heaviest_from_root(&wgg),
            });
            Ok(vec![json_artifact("tree.json", &tree)?, json_artifact("ccm.json", &doc)?])
        }
        "converge" => {
            let rows = convergence_test(
                &usize_list(p, "n-grid")?,
                &dist(p, "u")?,
                &dist(p, "v")?,
                parse(p, "horizon", "a number")?,
                parse(p, "reps", "a positive integer")?,
                parse(p, "seed", "an unsigned integer")?,
            )?;
            let mut csv = String::from("n,reps,ks_vertex_count,ks_w_tilde\n");
            for r in rows {
                writeln!(csv, "{},{},{},{}", r.n, r.reps, r.ks_vertex_count, r.ks_w_tilde)
                    .expect("string write");
            }
            Ok(vec![Artifact { suffix: "csv", content: csv }])
        }
        "solve-ftw" => {
            let grid = solve_grid(p)?;
            Ok(vec![
                Artifact { suffix: "csv", content: grid.to_csv() },
                json_artifact("grid.json", &grid)?,
            ])
        }
        "validate-ftw" => {
            let grid = solve_grid(p)?;
            let rows = mc_validate_ftw(
                &grid,
                &checkpoint_list(p, "checkpoints")?,
                parse(p, "reps", "a positive integer")?,
                parse(p, "seed", "an unsigned integer")?,
            )?;
            let mut csv = String::from("t,w,solver,monte_carlo,mc_stderr,reps\n");
            for r in rows {
                writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    r.t, r.w, r.solver, r.monte_carlo, r.mc_stderr, r.reps
                )
                .expect("string write");
            }
            Ok(vec![Artifact { suffix: "csv", content: csv }])
        }
        other => Err(CliError::Usage(format!("unknown command `{other}`"))),
    }
}

fn solve_grid(p: &Params) -> Result<sog_lab::FixedPointGrid, CliError> {
    solve_ftw(
        &dist(p, "u")?,
        parse(p, "t-max", "a number")?,
        parse(p, "w-max", "a number")?,
        parse(p, "dt", "a number")?,
        parse(p, "dw", "a number")?,
    )
    .map_err(CliError::Lib)
}
