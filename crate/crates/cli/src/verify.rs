use crate::args::{Format, VerifyArgs};
use crate::config::{pick, pick_flag, ConfigFile, Scalar};
use crate::error::CliError;
use crate::output::{csv, Context};
use scattering_symbolic::{cocycle_identity, standard_corpus, Identity, Rational, RuleSet, DEFAULT_DEPTH};
use serde::Serialize;

#[derive(Serialize)]
struct Outcome {
    name: String,
    proved: bool,
    replayed: bool,
    steps: usize,
    support_facts: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    trace: Vec<String>,
}

#[derive(Serialize)]
struct Row<'a> {
    name: &'a str,
    proved: bool,
    replayed: bool,
    steps: usize,
    support_facts: usize,
}

#[derive(Serialize)]
struct Report {
    epsilon: String,
    depth: usize,
    rules: &'static str,
    passed: bool,
    identities: Vec<Outcome>,
}

fn rational(flag: &Option<String>, file: &Option<Scalar>, default: &str, what: &str) -> Result<Rational, CliError> {
    let text = match (flag, file) {
        (Some(t), _) => t.clone(),
        (None, Some(s)) => s.as_rational_text(),
        (None, None) => default.into(),
    };
    text.trim().parse().map_err(|_| CliError::Domain(format!("{what} `{text}` is not a rational number")))
}

fn attempt(id: &Identity, depth: usize, rules: &RuleSet) -> Outcome {
    match id.prove(depth, rules) {
        Ok(trace) => {
            let replay = trace.replay();
            Outcome {
                name: id.name.clone(),
                proved: true,
                replayed: replay.is_ok(),
                steps: trace.steps.len(),
                support_facts: trace.support_facts_checked(),
                error: replay.err().map(|e| e.to_string()),
                trace: trace.render().lines().map(str::to_owned).collect(),
            }
        }
        Err(e) => Outcome {
            name: id.name.clone(),
            proved: false,
            replayed: false,
            steps: 0,
            support_facts: 0,
            error: Some(e.to_string()),
            trace: Vec::new(),
        },
    }
}

pub fn run(args: &VerifyArgs, file: &ConfigFile, ctx: &Context) -> Result<Option<String>, CliError> {
    let eps = rational(&args.epsilon, &file.epsilon, "1", "epsilon")?;
    let depth = pick(args.depth, &file.depth).unwrap_or(DEFAULT_DEPTH);
    let corrupt = pick_flag(args.corrupt_rules, file.corrupt_rules);
    let rules = if corrupt { RuleSet::corrupted() } else { RuleSet::standard() };
    let has_t = args.t.is_some() || file.t.is_some();
    let has_s = args.s.is_some() || file.s.is_some();
    let identities = match (has_t, has_s) {
        (true, true) => {
            let t = rational(&args.t, &file.t, "0", "t")?;
            let s = rational(&args.s, &file.s, "0", "s")?;
            vec![cocycle_identity(&t, &s, &eps)?]
        }
        (false, false) => standard_corpus(&eps)?,
        _ => return Err(CliError::Domain("--t and --s must be given together".into())),
    };
    let outcomes: Vec<Outcome> = identities.iter().map(|id| attempt(id, depth, &rules)).collect();
    let failed: Vec<&str> = outcomes.iter().filter(|o| !(o.proved && o.replayed)).map(|o| o.name.as_str()).collect();
    let failure = (!failed.is_empty()).then(|| format!("{} of {} identities failed: {}", failed.len(), outcomes.len(), failed.join(", ")));
    let text = match ctx.format_or(Format::Json) {
        Format::Csv => {
            let rows: Vec<Row> = outcomes
                .iter()
                .map(|o| Row {
                    name: &o.name,
                    proved: o.proved,
                    replayed: o.replayed,
                    steps: o.steps,
                    support_facts: o.support_facts,
                })
                .collect();
            csv(&rows)?
        }
        Format::Json => {
            let report = Report {
                epsilon: eps.to_string(),
                depth,
                rules: if corrupt { "corrupted" } else { "standard" },
                passed: failure.is_none(),
                identities: outcomes,
            };
            ctx.json("verify", &report)?
        }
    };
    ctx.emit(&text)?;
    Ok(failure)
}
