mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use efl_core::characters::{build_character, localize_dirichlet, CharacterSpec, DirichletCharacter};
use efl_core::explicit_formula::{load_zeros, verify_explicit_formula};
use efl_core::gamma_factors::gamma_factor;
use efl_core::kernel::QuadratureConfig;
use efl_core::log_fourier::{constants_for, g_eval_arch, g_eval_finite, ArchFunction, ArchSupport, OmegaTag};
use efl_core::padic::{random_bruhat, Ball, BruhatFile, BruhatFunction, LocalCharacter, Place, PlaceCharacter};
use efl_core::test_functions::{mellin, TestFunction};
use efl_core::weil_local::{
    conductor_integral, conductor_operator_apply, unit_sphere_eigenfunction, weil_term_arch, weil_term_finite,
    IdeleLocalComponent,
};
use efl_core::zabrodin::action_equality_check;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use output::{render, Format};

/// Local terms, Gamma factors and the explicit formula over the rationals.
#[derive(Parser, Debug, Serialize)]
#[command(name = "efl", version)]
#[serde(rename_all = "camelCase")]
struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Absolute and relative quadrature tolerance.
    #[arg(long, default_value_t = 1e-10, global = true)]
    quad_tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
enum Command {
    /// Local Gamma factor at a place.
    Gamma(GammaArgs),
    /// G = FT(-log|x|) applied to a test function.
    Logft(LogftArgs),
    /// Local Weil term at a place.
    Weil(WeilArgs),
    /// Conductor integral of a local character.
    Conductor(ConductorArgs),
    /// Conductor operator H applied to a cuspidal function.
    Hop(HopArgs),
    /// Explicit formula.
    Ef {
        #[command(subcommand)]
        action: EfAction,
    },
    /// Momentum and position forms of the p-adic action.
    Zabrodin(ZabrodinArgs),
    /// Mellin transform of a test function.
    Mellin(MellinArgs),
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
enum EfAction {
    /// Compares the zero side and the prime side.
    Verify(EfArgs),
}

/// A Dirichlet character: `--char trivial|mod:M:gen:G:exp:E`, or the same
/// through `--char-modulus` with paired, repeatable `--char-gen`/`--char-exp`.
#[derive(Args, Debug, Serialize, Default)]
#[serde(rename_all = "camelCase")]
struct CharArgs {
    #[arg(long = "char", visible_alias = "character", conflicts_with = "char_modulus")]
    char_spec: Option<String>,
    #[arg(long)]
    char_modulus: Option<u64>,
    #[arg(long, requires = "char_modulus")]
    char_gen: Vec<u64>,
    #[arg(long, requires = "char_modulus", allow_hyphen_values = true)]
    char_exp: Vec<String>,
}

impl CharArgs {
    fn spec_string(&self) -> Result<String> {
        if let Some(s) = &self.char_spec {
            return Ok(s.clone());
        }
        let Some(m) = self.char_modulus else {
            return Ok("trivial".into());
        };
        if self.char_gen.len() != self.char_exp.len() {
            bail!("--char-gen and --char-exp must be given the same number of times");
        }
        let mut s = format!("mod:{m}");
        for (g, e) in self.char_gen.iter().zip(&self.char_exp) {
            s.push_str(&format!(":gen:{g}:exp:{e}"));
        }
        Ok(s)
    }

    fn dirichlet(&self) -> Result<DirichletCharacter> {
        Ok(build_character(&CharacterSpec::parse(&self.spec_string()?)?)?)
    }

    /// The character at `place`; a synthetic δ is carried over to the
    /// localized character.
    fn at_place(&self, place: Place, twist: i32) -> Result<PlaceCharacter> {
        match place {
            Place::Finite { p, delta } => {
                let chi = self.dirichlet()?;
                let local = match localize_dirichlet(&chi, Place::finite(p)?)? {
                    PlaceCharacter::Finite(c) => c,
                    _ => unreachable!("finite place"),
                };
                let local = if delta == 0 {
                    local
                } else {
                    LocalCharacter::new(place, local.theta(), local.conductor_exponent(), local.unit_table().to_vec())?
                };
                Ok(PlaceCharacter::Finite(local))
            }
            Place::Real => Ok(PlaceCharacter::Real { odd: self.dirichlet()?.is_odd() }),
            Place::Complex => Ok(PlaceCharacter::Complex { twist }),
        }
    }
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct GammaArgs {
    /// `p:5`, `p:3:delta:1`, `real` or `complex`.
    #[arg(long)]
    place: String,
    #[command(flatten)]
    character: CharArgs,
    /// Twist n of z -> (z/|z|)^n at the complex place.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    twist: i32,
    /// A complex number such as `0.5+14.1i`.
    #[arg(long, allow_hyphen_values = true)]
    s: String,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct LogftArgs {
    #[arg(long)]
    place: String,
    /// A Bruhat function file, `builtin:unitball` or `builtin:gaussian`.
    #[arg(long)]
    phi: String,
    /// Regularization tag; defaults to the first tag defined at the place.
    #[arg(long)]
    regularization: Option<String>,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct WeilArgs {
    #[arg(long)]
    place: String,
    #[arg(long, default_value = "bump:0.5:2")]
    test_fn: String,
    #[command(flatten)]
    character: CharArgs,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    twist: i32,
    #[arg(long)]
    regularization: Option<String>,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct ConductorArgs {
    #[arg(long)]
    p: u32,
    #[command(flatten)]
    character: CharArgs,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct HopArgs {
    #[arg(long)]
    p: u32,
    /// A Bruhat function file; when absent, the unit-sphere eigenfunction of
    /// the given character is used.
    #[arg(long)]
    phi: Option<String>,
    #[arg(long, default_value_t = 0)]
    delta: u32,
    #[command(flatten)]
    character: CharArgs,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct EfArgs {
    #[command(flatten)]
    character: CharArgs,
    #[arg(long, default_value = "bump:0.5:2")]
    test_fn: String,
    /// Zero table; defaults to the bundled zeta zeros.
    #[arg(long)]
    zeros: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    max_zeros: usize,
    #[arg(long, default_value = "realIndicator")]
    regularization: String,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct ZabrodinArgs {
    #[arg(long)]
    p: u32,
    #[arg(long, default_value_t = 0)]
    delta: u32,
    /// A Bruhat function file, `builtin:unitball` or `random`.
    #[arg(long, default_value = "builtin:unitball")]
    phi: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of random functions.
    #[arg(long, default_value_t = 1)]
    count: usize,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct MellinArgs {
    #[arg(long, default_value = "bump:0.5:2")]
    test_fn: String,
    #[arg(long, allow_hyphen_values = true)]
    s: String,
}

/// Outcome of a command: the result document and whether a verification
/// it performs succeeded.
struct Report {
    result: Value,
    verified: bool,
}

impl Report {
    fn ok(result: Value) -> Self {
        Self { result, verified: true }
    }
}

fn parse_complex(text: &str) -> Result<Complex64> {
    let bad = || anyhow!("cannot parse complex number `{text}`");
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(t.parse().map_err(|_| bad())?, 0.0));
    };
    // split before the last sign that is not part of an exponent
    let split = body
        .char_indices()
        .filter(|&(i, c)| (c == '+' || c == '-') && i > 0 && !matches!(body.as_bytes()[i - 1], b'e' | b'E'))
        .map(|(i, _)| i)
        .next_back();
    let imag = |s: &str| -> Result<f64> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => s.parse().map_err(|_| bad()),
        }
    };
    match split {
        Some(i) => Ok(Complex64::new(body[..i].parse().map_err(|_| bad())?, imag(&body[i..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

fn complex_json(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn data_dir() -> PathBuf {
    std::env::var_os("EFL_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

fn parse_tag(place: &Place, tag: Option<&str>) -> Result<OmegaTag> {
    match tag {
        Some(t) => Ok(t.parse()?),
        None => Ok(OmegaTag::default_for(place)),
    }
}

fn load_bruhat(spec: &str, p: u32, delta: u32) -> Result<BruhatFunction> {
    if spec == "builtin:unitball" {
        return Ok(BruhatFunction::indicator(Ball::around_zero(p, 0), delta));
    }
    if spec.starts_with("builtin:") {
        bail!("unknown builtin `{spec}` for a finite place (expected builtin:unitball)");
    }
    let text = std::fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
    let file: BruhatFile = serde_json::from_str(&text).with_context(|| format!("parsing {spec}"))?;
    let phi = file.to_function()?;
    if phi.p() != p || phi.delta() != delta {
        bail!("{spec} lives on Q_{} with delta {}, expected Q_{p} with delta {delta}", phi.p(), phi.delta());
    }
    Ok(phi)
}

fn bruhat_json(phi: &BruhatFunction) -> Value {
    serde_json::to_value(BruhatFile::from_function(phi)).expect("serializable")
}

fn gamma(args: &GammaArgs) -> Result<Report> {
    let place: Place = args.place.parse()?;
    let chi = args.character.at_place(place, args.twist)?;
    let s = parse_complex(&args.s)?;
    let g = gamma_factor(&chi, s)?;
    Ok(Report::ok(json!({
        "re": g.value.re,
        "im": g.value.im,
        "abs": g.value.norm(),
        "branch": g.branch,
        "s": complex_json(s),
    })))
}

fn logft(args: &LogftArgs, cfg: &QuadratureConfig) -> Result<Report> {
    let place: Place = args.place.parse()?;
    let tag = parse_tag(&place, args.regularization.as_deref())?;
    let constants = constants_for(&place, tag)?;
    let value = match place {
        Place::Finite { p, delta } => g_eval_finite(&load_bruhat(&args.phi, p, delta)?, tag)?,
        Place::Real | Place::Complex => {
            if args.phi != "builtin:gaussian" {
                bail!("archimedean places accept only --phi builtin:gaussian");
            }
            let support = ArchSupport::compact(8.0);
            let real = |x: f64| Complex64::new((-std::f64::consts::PI * x * x).exp(), 0.0);
            let complex = |z: Complex64| Complex64::new((-2.0 * std::f64::consts::PI * z.norm_sqr()).exp(), 0.0);
            let phi = if place == Place::Real {
                ArchFunction::Real(&real)
            } else {
                ArchFunction::Complex(&complex)
            };
            g_eval_arch(&phi, &support, tag, cfg)?
        }
    };
    Ok(Report::ok(json!({"value": complex_json(value), "constants": constants})))
}

fn weil(args: &WeilArgs, cfg: &QuadratureConfig) -> Result<Report> {
    let place: Place = args.place.parse()?;
    let tag = parse_tag(&place, args.regularization.as_deref())?;
    let f: TestFunction = args.test_fn.parse()?;
    let comp = IdeleLocalComponent::new(f, args.character.at_place(place, args.twist)?);
    let result = if place.is_finite() {
        let w = weil_term_finite(&comp)?;
        json!({
            "value": complex_json(w.value),
            "convolutionPath": complex_json(w.convolution_path),
            "annulusPath": complex_json(w.annulus_path),
            "unitCircle": complex_json(w.unit_circle),
            "offCircle": complex_json(w.off_circle),
            "different": complex_json(w.different),
        })
    } else {
        json!({"value": complex_json(weil_term_arch(&comp, tag, cfg)?), "regularization": tag})
    };
    Ok(Report::ok(result))
}

fn conductor(args: &ConductorArgs) -> Result<Report> {
    let chi = match args.character.at_place(Place::finite(args.p)?, 0)? {
        PlaceCharacter::Finite(c) => c,
        _ => unreachable!("finite place"),
    };
    let f = chi.conductor_exponent();
    let value = conductor_integral(&chi);
    let target = f as f64 * (args.p as f64).ln();
    Ok(Report {
        result: json!({"value": value, "expected": "f*log q", "f": f, "fLogQ": target}),
        verified: (value - target).abs() <= 1e-12,
    })
}

fn hop(args: &HopArgs) -> Result<Report> {
    let phi = match &args.phi {
        Some(spec) => load_bruhat(spec, args.p, args.delta)?,
        None => {
            let place = Place::finite_with_delta(args.p, args.delta)?;
            match args.character.at_place(place, 0)? {
                PlaceCharacter::Finite(c) => unit_sphere_eigenfunction(&c)?,
                _ => unreachable!("finite place"),
            }
        }
    };
    let h = conductor_operator_apply(&phi)?;
    let rayleigh = h.inner(&phi) / phi.inner(&phi);
    Ok(Report::ok(json!({
        "input": bruhat_json(&phi),
        "result": bruhat_json(&h),
        "rayleighQuotient": complex_json(rayleigh),
    })))
}

fn ef_verify(args: &EfArgs, cfg: &QuadratureConfig) -> Result<(Report, Value)> {
    let chi = args.character.dirichlet()?;
    let f: TestFunction = args.test_fn.parse()?;
    let tag: OmegaTag = args.regularization.parse()?;
    let path = match &args.zeros {
        Some(p) if p.exists() => p.clone(),
        Some(p) => {
            let bundled = data_dir().join(p.file_name().ok_or_else(|| anyhow!("invalid zero table path"))?);
            if !bundled.exists() {
                bail!("zero table {} not found", p.display());
            }
            bundled
        }
        None => data_dir().join("zeta_zeros.txt"),
    };
    let zeros = load_zeros(&path)?;
    let report = verify_explicit_formula(&f, &chi, &zeros, args.max_zeros, tag, cfg)?;
    let verified = report.passed();
    let mut result = serde_json::to_value(&report)?;
    if let Value::Object(map) = &mut result {
        map.insert("passed".into(), json!(verified));
    }
    Ok((Report { result, verified }, json!({"zerosPath": path.display().to_string()})))
}

fn zabrodin(args: &ZabrodinArgs) -> Result<Report> {
    let functions = if args.phi == "random" {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        (0..args.count).map(|_| random_bruhat(&mut rng, args.p, args.delta, 5, true)).collect()
    } else {
        vec![load_bruhat(&args.phi, args.p, args.delta)?]
    };
    let mut values = Vec::new();
    let mut worst = 0.0f64;
    for phi in &functions {
        let v = action_equality_check(phi)?;
        worst = worst.max(v.difference.abs() / (1.0 + v.momentum_form.abs()));
        values.push(v);
    }
    let verified = worst <= 1e-12;
    let result = if values.len() == 1 {
        let mut v = serde_json::to_value(values[0])?;
        if let Value::Object(map) = &mut v {
            map.insert("equal".into(), json!(verified));
        }
        v
    } else {
        json!({"values": values, "maxRelativeDifference": worst, "equal": verified})
    };
    Ok(Report { result, verified })
}

fn mellin_cmd(args: &MellinArgs, cfg: &QuadratureConfig) -> Result<Report> {
    let f: TestFunction = args.test_fn.parse()?;
    let s = parse_complex(&args.s)?;
    let v = mellin(&f, s, cfg)?;
    Ok(Report::ok(json!({"re": v.re, "im": v.im, "s": complex_json(s)})))
}

fn run(cli: &Cli) -> Result<(String, bool)> {
    let cfg = QuadratureConfig::with_tolerance(cli.quad_tol);
    cfg.validate()?;
    let mut config = serde_json::to_value(cli)?;
    let report = match &cli.command {
        Command::Gamma(a) => gamma(a)?,
        Command::Logft(a) => logft(a, &cfg)?,
        Command::Weil(a) => weil(a, &cfg)?,
        Command::Conductor(a) => conductor(a)?,
        Command::Hop(a) => hop(a)?,
        Command::Ef { action: EfAction::Verify(a) } => {
            let (report, extra) = ef_verify(a, &cfg)?;
            if let (Value::Object(c), Value::Object(e)) = (&mut config, extra) {
                c.extend(e);
            }
            report
        }
        Command::Zabrodin(a) => zabrodin(a)?,
        Command::Mellin(a) => mellin_cmd(a, &cfg)?,
    };
    if let Value::Object(c) = &mut config {
        c.insert("quadrature".into(), serde_json::to_value(cfg)?);
    }
    Ok((render(report.result, config, cli.format), report.verified))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok((text, verified)) => {
            print!("{text}");
            if verified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
