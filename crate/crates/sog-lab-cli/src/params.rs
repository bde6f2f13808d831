//! Parameter schemas, config-file parsing, and layered resolution:
//! built-in default < config file (global, then [command] section) < CLI flag.

use std::collections::BTreeMap;

use crate::CliError;

pub struct KeySpec {
    pub name: &'static str,
    pub default: Option<&'static str>,
    pub required: bool,
    pub help: &'static str,
}

pub struct CommandSpec {
    pub name: &'static str,
    pub about: &'static str,
    pub keys: &'static [KeySpec],
}

const fn req(name: &'static str, help: &'static str) -> KeySpec {
    KeySpec { name, default: None, required: true, help }
}

const fn def(name: &'static str, default: &'static str, help: &'static str) -> KeySpec {
    KeySpec { name, default: Some(default), required: false, help }
}

const fn opt(name: &'static str, help: &'static str) -> KeySpec {
    KeySpec { name, default: None, required: false, help }
}

const SEED: KeySpec = def("seed", "0", "root RNG seed");

pub const COMMANDS: &[CommandSpec] = &[
    CommandSpec {
        name: "generate",
        about: "Generate a weighted window and write it as JSON",
        keys: &[
            req("n", "window length (vertices 0..n)"),
            req("p", "edge probability in (0, 1]"),
            req("u", "edge-weight law, e.g. exponential(1)"),
            req("v", "vertex-weight law, e.g. constant(0)"),
            def("mode", "sparse", "generation mode: sparse or dense"),
            SEED,
        ],
    },
    CommandSpec {
        name: "heaviest",
        about: "Heaviest path between two vertices of a generated window",
        keys: &[
            req("n", "window length"),
            req("p", "edge probability"),
            req("u", "edge-weight law"),
            req("v", "vertex-weight law"),
            def("i", "0", "source vertex"),
            req("j", "target vertex"),
            def("variant", "full", "weight variant: full or edge_only"),
            def("mode", "sparse", "generation mode: sparse or dense"),
            SEED,
        ],
    },
    CommandSpec {
        name: "skeleton",
        about: "Skeleton-point density over replicated windows",
        keys: &[
            req("n", "window length"),
            req("p", "edge probability"),
            def("u", "constant(1)", "edge-weight law"),
            def("v", "constant(0)", "vertex-weight law"),
            def("margin", "1", "boundary margin excluded from candidates"),
            def("reps", "200", "window replications"),
            SEED,
        ],
    },
    CommandSpec {
        name: "renewal",
        about: "c-renewal point density over replicated windows",
        keys: &[
            req("n", "window length"),
            req("p", "edge probability"),
            req("u", "edge-weight law"),
            req("v", "vertex-weight law"),
            req("c", "renewal threshold"),
            def("reps", "200", "window replications"),
            SEED,
        ],
    },
    CommandSpec {
        name: "estimate-c",
        about: "Estimate the growth constant C",
        keys: &[
            req("n", "window length"),
            req("p", "edge probability"),
            req("u", "edge-weight law"),
            req("v", "vertex-weight law"),
            opt("c", "renewal threshold (default: pilot suggestion)"),
            def("method", "plug_in", "estimator: plug_in or regenerative"),
            def("reps", "200", "window replications"),
            def("margin", "1", "boundary margin for detection"),
            SEED,
        ],
    },
    CommandSpec {
        name: "estimate-b2",
        about: "Estimate the CLT variance b^2 from regeneration cycles",
        keys: &[
            req("n", "window length"),
            req("p", "edge probability"),
            req("u", "edge-weight law"),
            req("v", "vertex-weight law"),
            opt("c", "renewal threshold (default: pilot suggestion)"),
            def("reps", "200", "window replications"),
            def("margin", "1", "boundary margin for detection"),
            def("bootstrap", "1000", "bootstrap resamples for the stderr"),
            SEED,
        ],
    },
    CommandSpec {
        name: "clt",
        about: "Normality diagnostics for the window maximum along an n grid",
        keys: &[
            req("n-grid", "ascending comma-separated n values, e.g. 250,1000,4000"),
            req("p", "edge probability"),
            req("u", "edge-weight law"),
            req("v", "vertex-weight law"),
            def("reps", "1000", "replications per grid point"),
            SEED,
        ],
    },
    CommandSpec {
        name: "cascade",
        about: "Simulate a truncated cascade tree and its collapsed graph",
        keys: &[
            req("u", "edge-weight law"),
            req("v", "vertex-weight law"),
            req("horizon", "truncation radius (at most 12)"),
            opt("n", "lattice scale; with p-n selects the discrete flavor"),
            opt("p-n", "gap success probability for the discrete flavor"),
            SEED,
        ],
    },
    CommandSpec {
        name: "converge",
        about: "Sparse-limit convergence diagnostics: discrete trees vs cascade",
        keys: &[
            req("n-grid", "ascending comma-separated n values"),
            req("u", "edge-weight law"),
            req("v", "vertex-weight law"),
            def("horizon", "2", "truncation radius"),
            def("reps", "1000", "replications per grid point (at least 500)"),
            SEED,
        ],
    },
    CommandSpec {
        name: "solve-ftw",
        about: "Solve the cascade heaviest-path tail F(t, w) on a grid",
        keys: &[
            req("u", "edge-weight law (strictly positive)"),
            def("t-max", "1", "time horizon"),
            def("w-max", "2", "weight horizon"),
            def("dt", "0.01", "time step (t-max must be a whole multiple)"),
            def("dw", "0.01", "weight step (w-max must be a whole multiple)"),
            SEED,
        ],
    },
    CommandSpec {
        name: "validate-ftw",
        about: "Cross-check the F(t, w) solver against cascade simulation",
        keys: &[
            req("u", "edge-weight law (strictly positive)"),
            def("t-max", "1", "time horizon"),
            def("w-max", "2", "weight horizon"),
            def("dt", "0.01", "time step"),
            def("dw", "0.01", "weight step"),
            req("checkpoints", "comma-separated t:w pairs, e.g. 1:0.5,1:1.5"),
            def("reps", "10000", "simulations per checkpoint"),
            SEED,
        ],
    },
];

pub fn find_command(name: &str) -> Option<&'static CommandSpec> {
    COMMANDS.iter().find(|c| c.name == name)
}

/// Parsed config file: `key = value` lines, with an optional `[command]`
/// section header scoping the lines below it; lines above any header apply
/// to every command that has the key.
pub struct ConfigFile {
    global: Vec<(String, String)>,
    sections: BTreeMap<String, Vec<(String, String)>>,
}

pub fn parse_config(text: &str) -> Result<ConfigFile, CliError> {
    let mut global = Vec::new();
    let mut sections: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim();
            if find_command(name).is_none() {
                return Err(CliError::Usage(format!(
                    "config line {ln}: unknown section `[{name}]`{}",
                    suggestion(name, COMMANDS.iter().map(|c| c.name))
                )));
            }
            current = Some(name.to_string());
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config line {ln}: expected `key = value` or `[section]`, got `{line}`"
            )));
        };
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        match &current {
            Some(section) => {
                let spec = find_command(section).expect("validated above");
                if !spec.keys.iter().any(|k| k.name == key) {
                    return Err(CliError::Usage(format!(
                        "config line {ln}: unknown key `{key}` for `{section}`{}",
                        suggestion(&key, spec.keys.iter().map(|k| k.name))
                    )));
                }
                sections.entry(section.clone()).or_default().push((key, value));
            }
            None => {
                let known = COMMANDS.iter().flat_map(|c| c.keys).any(|k| k.name == key);
                if !known {
                    return Err(CliError::Usage(format!(
                        "config line {ln}: unknown key `{key}`{}",
                        suggestion(&key, COMMANDS.iter().flat_map(|c| c.keys).map(|k| k.name))
                    )));
                }
                global.push((key, value));
            }
        }
    }
    Ok(ConfigFile { global, sections })
}

/// Resolve the parameter map for one command; later layers win.
pub fn resolve(
    spec: &CommandSpec,
    config: Option<&ConfigFile>,
    cli: &clap::ArgMatches,
) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for k in spec.keys {
        if let Some(d) = k.default {
            out.insert(k.name.to_string(), d.to_string());
        }
    }
    if let Some(cfg) = config {
        for (k, v) in &cfg.global {
            if spec.keys.iter().any(|ks| ks.name == k) {
                out.insert(k.clone(), v.clone());
            }
        }
        if let Some(section) = cfg.sections.get(spec.name) {
            for (k, v) in section {
                out.insert(k.clone(), v.clone());
            }
        }
    }
    for k in spec.keys {
        if let Some(v) = cli.get_one::<String>(k.name) {
            out.insert(k.name.to_string(), v.clone());
        }
    }
    let missing: Vec<&str> = spec
        .keys
        .iter()
        .filter(|k| k.required && !out.contains_key(k.name))
        .map(|k| k.name)
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Usage(format!(
            "`{}` is missing required parameter(s): {}",
            spec.name,
            missing.join(", ")
        )));
    }
    Ok(out)
}

fn suggestion<'a>(name: &str, candidates: impl Iterator<Item = &'a str>) -> String {
    let mut best: Option<(usize, &str)> = None;
    for c in candidates {
        let d = levenshtein(name, c);
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, c));
        }
    }
    match best {
        Some((d, c)) if d <= 2 => format!("; did you mean `{c}`?"),
        _ => String::new(),
    }
}

fn levenshtein(a: &str, b: &str) -> usize {
    let (a, b): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, &ca) in a.iter().enumerate() {
        let mut row = vec![i + 1];
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            row.push(sub.min(prev[j + 1] + 1).min(row[j] + 1));
        }
        prev = row;
    }
    prev[b.len()]
}
