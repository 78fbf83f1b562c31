//! Command-line front end.
//!
//! Inputs are JSON files (`-` reads stdin), catalog preset names, or an inline
//! word given with `--word "z: y^2/x; y: x^2*z"` in the context set by `--m`,
//! `--n`, `--p`. Exit codes: 0 on success, 1 when a computation or check
//! fails, 2 on usage and input errors.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num_traits::Zero;
use serde_json::{json, Value};

use crate::catalog::{self, NamedExample};
use crate::error::Error;
use crate::group::probe::word_jacobian;
use crate::group::{Automorphism, Generator, GeneratorWord, Slot};
use crate::io::{parse_rational, word_to_json, At2File, StagesFile, WordFile, SCHEMA_VERSION};
use crate::mt2::{mt2_pipeline, stages_from_word, Mt2Input};
use crate::reduce::{
    at2_pipeline, mt1_pipeline, n2_reduce, Certificate, CertificateJson, Mt1Stage,
};
use crate::ring::{parse_poly, RingContext};
use crate::weights::{minimal_tau, sigma_sequence};

#[derive(Debug, Parser)]
#[command(
    name = "rescoord",
    version,
    about = "Coordinates over A[x] from words over A[x, 1/x]"
)]
struct Cli {
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// JSON file, `-` for stdin, or a preset name.
    input: Option<String>,
    /// Inline word: `slot: poly` pairs separated by `;`, outermost first.
    #[arg(long, conflicts_with = "input")]
    word: Option<String>,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    p: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a word to its images.
    Compose(InputArgs),
    /// Invert a word.
    Invert(InputArgs),
    /// Jacobian determinant of a word.
    Jacobian(InputArgs),
    /// Sigma-sequence of a word of z-elementaries.
    SigmaSeq(InputArgs),
    /// Minimal weight vector of the composite map.
    MinimalTau(InputArgs),
    /// Reduce `alpha o Phi_0 o .. o Phi_q` to a coordinate system over R.
    At2(InputArgs),
    /// Run the first main pipeline on a stage list with weights.
    Mt1(InputArgs),
    /// Run the rewriting pipeline for two z-variables.
    Mt2(InputArgs),
    /// Two-variable reduction of a single automorphism.
    N2(InputArgs),
    /// Re-check a stored certificate.
    Verify(InputArgs),
    /// Run a named construction, or list them.
    Catalog(CatalogArgs),
}

#[derive(Debug, Args)]
struct CatalogArgs {
    /// nagata, anick, venereau, venereau-type, russell or crucial-difficulty.
    name: Option<String>,
    /// `Q(w1, w2)` for venereau-type.
    #[arg(long = "q", alias = "Q")]
    q: Option<String>,
    /// `f(x, y)` for russell.
    #[arg(long)]
    f: Option<String>,
    #[arg(long, default_value_t = 1)]
    s: u32,
    #[arg(long, default_value = "1")]
    lambda: String,
    /// Emit the input word instead of running the pipeline.
    #[arg(long)]
    word: bool,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure {
            code: 2,
            msg: msg.into(),
        }
    }

    fn check(msg: impl Into<String>) -> Self {
        Failure {
            code: 1,
            msg: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::UnknownVariable(_)
            | Error::InvalidContext(_)
            | Error::Serialization(_) => 2,
            _ => 1,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

type CmdResult = std::result::Result<String, Failure>;

/// Run with the process arguments and standard streams.
pub fn run() -> i32 {
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(
        std::env::args_os(),
        &mut stdin.lock(),
        &mut stdout.lock(),
        &mut stderr.lock(),
    )
}

/// Run with explicit arguments (including the program name) and streams.
pub fn run_with<I, T>(
    args: I,
    stdin: &mut dyn Read,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(&cli, stdin) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            if !text.ends_with('\n') {
                let _ = out.write_all(b"\n");
            }
            0
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            f.code
        }
    }
}

fn dispatch(cli: &Cli, stdin: &mut dyn Read) -> CmdResult {
    let json = cli.json;
    match &cli.command {
        Command::Compose(a) => compose(&load(a, stdin)?.word()?, json),
        Command::Invert(a) => invert(&load(a, stdin)?.word()?, json),
        Command::Jacobian(a) => jacobian(&load(a, stdin)?.word()?, json),
        Command::SigmaSeq(a) => sigma_seq(&load(a, stdin)?.elementaries()?, json),
        Command::MinimalTau(a) => min_tau(&load(a, stdin)?.word()?, json),
        Command::At2(a) => {
            let (alpha, word) = load(a, stdin)?.at2()?;
            certificate(at2_pipeline(&alpha, &word)?, json)
        }
        Command::Mt1(a) => {
            let (ctx, stages) = load(a, stdin)?.mt1()?;
            certificate(mt1_pipeline(&ctx, &stages)?, json)
        }
        Command::Mt2(a) => {
            let (ctx, inputs) = load(a, stdin)?.mt2()?;
            certificate(mt2_pipeline(&ctx, &inputs)?, json)
        }
        Command::N2(a) => n2(&load(a, stdin)?.word()?, json),
        Command::Verify(a) => verify(load(a, stdin)?, json),
        Command::Catalog(c) => catalog_cmd(c, json),
    }
}

/// A resolved input.
enum Input {
    Word(GeneratorWord),
    At2(Automorphism, GeneratorWord),
    Stages(StagesFile),
    Certificate(CertificateJson),
    Preset(Box<NamedExample>),
}

impl Input {
    fn word(&self) -> Result<GeneratorWord, Failure> {
        Ok(match self {
            Input::Word(w) => w.clone(),
            Input::At2(a, w) => a.word().then(w),
            Input::Preset(ex) => ex.word.clone(),
            Input::Stages(s) => {
                let (ctx, stages) = s.load()?;
                let mut w = GeneratorWord::empty(&ctx);
                for st in stages {
                    w = w.then(st.alpha.word());
                    if !st.rho.is_identity() {
                        w.push(Generator::GenPerm(st.rho));
                    }
                    w = w.then(st.phi.word());
                }
                w
            }
            Input::Certificate(_) => {
                return Err(Failure::usage("expected a word, got a certificate"))
            }
        })
    }

    /// The elementary part: the word of an at2 input or preset, else the whole word.
    fn elementaries(&self) -> Result<GeneratorWord, Failure> {
        match self {
            Input::At2(_, w) => Ok(w.clone()),
            Input::Preset(ex) => Ok(ex.elementaries.clone().unwrap_or_else(|| ex.word.clone())),
            _ => self.word(),
        }
    }

    fn at2(&self) -> Result<(Automorphism, GeneratorWord), Failure> {
        match self {
            Input::At2(a, w) => Ok((a.clone(), w.clone())),
            Input::Preset(ex) => ex
                .at2_inputs()
                .ok_or_else(|| Failure::usage(format!("preset `{}` has no at2 inputs", ex.id))),
            Input::Word(w) => Ok((Automorphism::identity(w.ctx()), w.clone())),
            _ => Err(Failure::usage("expected an at2 input or a word")),
        }
    }

    fn mt1(&self) -> Result<(Arc<RingContext>, Vec<Mt1Stage>), Failure> {
        let Input::Stages(s) = self else {
            return Err(Failure::usage("mt1 expects a stage list with weights"));
        };
        let (ctx, stages) = s.load()?;
        let stages = stages
            .into_iter()
            .enumerate()
            .map(|(i, st)| {
                let tau = st
                    .tau
                    .ok_or_else(|| Failure::usage(format!("stage {i} has no tau")))?;
                Ok(Mt1Stage::new(st.alpha, st.rho, st.phi, tau))
            })
            .collect::<Result<_, Failure>>()?;
        Ok((ctx, stages))
    }

    fn mt2(&self) -> Result<(Arc<RingContext>, Vec<Mt2Input>), Failure> {
        if let Input::Stages(s) = self {
            let (ctx, stages) = s.load()?;
            let inputs = stages
                .into_iter()
                .enumerate()
                .map(|(i, st)| match st.phi.word().generators() {
                    [g] => Ok(Mt2Input::new(st.alpha, st.rho, g.clone())),
                    _ => Err(Failure::usage(format!(
                        "stage {i}: phi must be a single generator"
                    ))),
                })
                .collect::<Result<_, Failure>>()?;
            return Ok((ctx, inputs));
        }
        let w = self.word()?;
        Ok((w.ctx().clone(), stages_from_word(&w)?))
    }
}

fn read_source(src: &str, stdin: &mut dyn Read) -> Result<String, Failure> {
    let mut text = String::new();
    if src == "-" {
        stdin
            .read_to_string(&mut text)
            .map_err(|e| Failure::usage(format!("reading stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(src)
            .map_err(|e| Failure::usage(format!("reading `{src}`: {e}")))?;
    }
    Ok(text)
}

fn load(a: &InputArgs, stdin: &mut dyn Read) -> Result<Input, Failure> {
    if let Some(text) = &a.word {
        let ctx = RingContext::new(a.m, a.n, a.p)?;
        return Ok(Input::Word(parse_inline_word(text, &ctx)?));
    }
    let src = a
        .input
        .as_deref()
        .ok_or_else(|| Failure::usage("an input file, `-`, a preset name or --word is required"))?;
    if src != "-" && !std::path::Path::new(src).exists() {
        if let Some(ex) = catalog::by_name(src) {
            return Ok(Input::Preset(Box::new(ex)));
        }
        return Err(Failure::usage(format!(
            "`{src}` is neither a file nor a preset ({})",
            catalog::PRESETS.join(", ")
        )));
    }
    parse_input(&read_source(src, stdin)?)
}

fn parse_input(text: &str) -> Result<Input, Failure> {
    let v: Value = serde_json::from_str(text).map_err(|e| Failure::usage(format!("JSON: {e}")))?;
    let bad = |e: serde_json::Error| Failure::usage(format!("JSON: {e}"));
    let has = |k: &str| v.get(k).is_some();
    if has("theta_y") {
        Ok(Input::Certificate(serde_json::from_value(v).map_err(bad)?))
    } else if has("stages") {
        let s: StagesFile = serde_json::from_value(v).map_err(bad)?;
        crate::io::check_version(s.version)?;
        Ok(Input::Stages(s))
    } else if has("alpha") {
        let f: At2File = serde_json::from_value(v).map_err(bad)?;
        let (a, w) = f.load()?;
        Ok(Input::At2(a, w))
    } else if has("word") {
        let f: WordFile = serde_json::from_value(v).map_err(bad)?;
        Ok(Input::Word(f.load()?))
    } else {
        Err(Failure::usage(
            "unrecognized JSON: expected a word, at2 input, stage list or certificate",
        ))
    }
}

/// `"z: y^2/x; y: x^2*z"`: each part names the variable that changes.
fn parse_inline_word(text: &str, ctx: &Arc<RingContext>) -> Result<GeneratorWord, Failure> {
    let mut gens = Vec::new();
    for part in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (var, poly) = part
            .split_once(':')
            .ok_or_else(|| Failure::usage(format!("expected `var: poly`, got `{part}`")))?;
        let var = var.trim();
        let idx = ctx
            .lookup(var)
            .ok_or_else(|| Failure::usage(format!("unknown variable `{var}`")))?;
        let slot = if ctx.is_z_index(idx) {
            Slot::Z(idx - ctx.z_index(0))
        } else if idx >= ctx.y_index(0) && ctx.m() > 0 {
            Slot::Y(idx - ctx.y_index(0))
        } else {
            return Err(Failure::usage(format!("`{var}` is a base-ring parameter")));
        };
        gens.push(Generator::elementary(slot, parse_poly(poly, ctx)?)?);
    }
    Ok(GeneratorWord::new(ctx, gens)?)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON value")
}

fn compose(w: &GeneratorWord, json: bool) -> CmdResult {
    let e = w.to_endo();
    Ok(if json {
        pretty(&json!({
            "version": SCHEMA_VERSION,
            "context": w.ctx().spec(),
            "images": e.image_strings(),
        }))
    } else {
        e.to_string()
    })
}

fn invert(w: &GeneratorWord, json: bool) -> CmdResult {
    let inv = w.inverse();
    Ok(if json {
        WordFile::new(&inv).to_json_string()?
    } else {
        format!("{inv}\n{}", inv.to_endo())
    })
}

fn jacobian(w: &GeneratorWord, json: bool) -> CmdResult {
    let det = word_jacobian(w).unwrap_or_else(|| w.to_endo().jacobian().determinant);
    let unit = det.as_constant().is_some_and(|c| !c.is_zero());
    Ok(if json {
        pretty(&json!({ "determinant": det.to_string(), "unit": unit }))
    } else {
        det.to_string()
    })
}

fn sigma_seq(w: &GeneratorWord, json: bool) -> CmdResult {
    let seq = sigma_sequence(w)?;
    Ok(if json {
        pretty(&json!({ "sigma_sequence": seq.sigmas, "monotone": seq.monotone }))
    } else {
        seq.sigmas
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",")
    })
}

fn min_tau(w: &GeneratorWord, json: bool) -> CmdResult {
    let tau = minimal_tau(&w.to_endo())?;
    Ok(if json {
        pretty(&json!({ "tau": tau }))
    } else {
        tau.to_string()
    })
}

fn checks_line(c: &crate::reduce::Checks) -> String {
    let flag = |b: bool| if b { "ok" } else { "FAIL" };
    format!(
        "over_r {}, id_mod_x {}, inverse_over_r {}, y_match {}, jacobian_unit {}, tame {}",
        flag(c.over_r),
        flag(c.id_mod_x),
        flag(c.inverse_over_r),
        flag(c.y_match),
        flag(c.jacobian_unit),
        if c.tame_flag { "yes" } else { "no" },
    )
}

fn certificate(cert: Certificate, json: bool) -> CmdResult {
    if json {
        return Ok(cert.to_json_string()?);
    }
    let mut s = String::new();
    for (j, p) in cert.theta_y.iter().enumerate() {
        let _ = writeln!(s, "theta({}) = {p}", cert.ctx.name(cert.ctx.y_index(j)));
    }
    match cert.theta.try_endo() {
        Some(e) => {
            let _ = writeln!(s, "theta = {e}");
        }
        None => {
            let _ = writeln!(
                s,
                "theta = <{} generators, not expanded>",
                cert.theta.word().len()
            );
        }
    }
    if !cert.sigma_sequence.is_empty() {
        let taus: Vec<_> = cert
            .sigma_sequence
            .iter()
            .map(ToString::to_string)
            .collect();
        let _ = writeln!(s, "weights: {}", taus.join(","));
    }
    let _ = writeln!(s, "checks: {}", checks_line(&cert.checks));
    let _ = writeln!(s, "evidence: {}", cert.evidence);
    let _ = write!(s, "steps: {}", cert.steps.len());
    if let Some(trace) = &cert.rewrite_trace {
        for line in trace {
            let _ = write!(s, "\n  {line}");
        }
    }
    Ok(s)
}

fn n2(w: &GeneratorWord, json: bool) -> CmdResult {
    let red = n2_reduce(&Automorphism::from_word(w.clone()))?;
    let theta = red.theta.endo();
    let over_r = theta.is_over_r() && red.theta.inverse_endo().is_over_r();
    if !over_r {
        return Err(Failure::check("check `over_r` failed"));
    }
    Ok(if json {
        pretty(&json!({
            "version": SCHEMA_VERSION,
            "context": w.ctx().spec(),
            "theta": theta.image_strings(),
            "corrections": word_to_json(&red.corrections),
            "t_trace": red.t_trace,
        }))
    } else {
        let t: Vec<_> = red.t_trace.iter().map(ToString::to_string).collect();
        format!(
            "theta = {theta}\ncorrections = {}\nt: {}",
            red.corrections,
            t.join(" > ")
        )
    })
}

fn verify(input: Input, json: bool) -> CmdResult {
    let Input::Certificate(c) = input else {
        return Err(Failure::usage("verify expects a certificate"));
    };
    let report = c.verify()?;
    let failing = report
        .checks
        .first_failure()
        .or((!report.stored_consistent).then_some("stored_consistent"));
    if let Some(name) = failing {
        return Err(Failure::check(format!("check `{name}` failed")));
    }
    Ok(if json {
        pretty(&json!({
            "passed": true,
            "checks": report.checks,
            "evidence": report.evidence,
        }))
    } else {
        format!(
            "certificate verified\nchecks: {}\nevidence: {}",
            checks_line(&report.checks),
            report.evidence
        )
    })
}

fn preset(c: &CatalogArgs, name: &str) -> Result<NamedExample, Failure> {
    match name {
        "venereau-type" => {
            let q =
                c.q.as_deref()
                    .ok_or_else(|| Failure::usage("venereau-type needs --q"))?;
            Ok(catalog::venereau_type(&parse_poly(
                q,
                &catalog::venereau_q_context(),
            )?)?)
        }
        "russell" => {
            let f =
                c.f.as_deref()
                    .ok_or_else(|| Failure::usage("russell needs --f"))?;
            let ctx = RingContext::new(1, 1, 0)?;
            let lambda = parse_rational(&c.lambda)?;
            Ok(catalog::russell(&parse_poly(f, &ctx)?, c.s, &lambda)?)
        }
        _ => catalog::by_name(name).ok_or_else(|| {
            Failure::usage(format!(
                "unknown preset `{name}`; known: {}, venereau-type, russell",
                catalog::PRESETS.join(", ")
            ))
        }),
    }
}

fn catalog_cmd(c: &CatalogArgs, json: bool) -> CmdResult {
    let Some(name) = c.name.as_deref() else {
        let mut names: Vec<&str> = catalog::PRESETS.to_vec();
        names.extend(["venereau-type", "russell"]);
        return Ok(if json {
            pretty(&json!({ "presets": names }))
        } else {
            names.join("\n")
        });
    };
    let ex = preset(c, name)?;
    if !ex.check() {
        return Err(Failure::check(format!(
            "check `expected` failed for preset `{}`",
            ex.id
        )));
    }
    if c.word {
        return Ok(match ex.at2_inputs() {
            Some((alpha, w)) => {
                serde_json::to_string_pretty(&At2File::new(alpha.word(), &w)).expect("serializable")
            }
            None => WordFile::new(&ex.word).to_json_string()?,
        });
    }
    let Some((alpha, w)) = ex.at2_inputs() else {
        return Ok(if json {
            WordFile::new(&ex.word).to_json_string()?
        } else {
            format!(
                "{}\nword = {}\nmap = {}",
                ex.description,
                ex.word,
                ex.word.to_endo()
            )
        });
    };
    let cert = at2_pipeline(&alpha, &w)?;
    if json {
        return certificate(cert, true);
    }
    Ok(format!(
        "{}\nword = {}\n{}",
        ex.description,
        ex.word,
        certificate(cert, false)?
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str], stdin: &str) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut input = stdin.as_bytes();
        let argv = std::iter::once("rescoord").chain(args.iter().copied());
        let code = run_with(argv, &mut input, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn empty_inline_word_composes_to_identity() {
        let (code, out, _) = run_args(&["compose", "--word", ""], "");
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "(y, z)");
    }

    #[test]
    fn inline_word_with_context_flags() {
        let (code, out, _) = run_args(&["jacobian", "--n", "2", "--word", "z2: z1^2; z1: y/x"], "");
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "1");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_args(&["frobnicate"], "").0, 2);
        assert_eq!(run_args(&["compose", "no-such-preset"], "").0, 2);
        assert_eq!(run_args(&["compose", "--word", "w: y"], "").0, 2);
        assert_eq!(run_args(&["verify", "-"], "{").0, 2);
    }

    #[test]
    fn nagata_certificate_round_trip() {
        let (code, cert, _) = run_args(&["--json", "catalog", "nagata"], "");
        assert_eq!(code, 0);
        let (code, out, _) = run_args(&["verify", "-"], &cert);
        assert_eq!(code, 0, "{out}");
    }

    #[test]
    fn tampered_certificate_names_the_check() {
        let (_, cert, _) = run_args(&["--json", "catalog", "nagata"], "");
        let mut v: Value = serde_json::from_str(&cert).unwrap();
        v["theta_y"][0] = json!("y + x*z");
        let (code, _, err) = run_args(&["verify", "-"], &v.to_string());
        assert_eq!(code, 1);
        assert!(err.contains("check `"), "{err}");
    }

    #[test]
    fn non_elementary_word_fails_at2() {
        let (code, _, err) = run_args(&["at2", "--word", "y: x*z"], "");
        assert_eq!(code, 1, "{err}");
    }
}
