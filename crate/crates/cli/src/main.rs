mod args;

use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use serde_json::{json, Value};

use args::{BatteryArgs, Cli, Command, OutFormat};
use expsum::affine::{build_a_alpha, growth_report, prop_p_iteration, IterationOptions};
use expsum::fourier::{
    dft_full, max_nonzero_ratio, spec_alpha, spec_alpha_exact, DftOptions, SpectrumField,
};
use expsum::lab::{gen_instance, run_sweep, verify_all, BatteryConfig, BatteryOptions, Instance};
use expsum::Execution;

/// Exit status when some check failed.
const EXIT_FAILED: u8 = 1;
/// Exit status for usage, config and runtime errors.
const EXIT_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(EXIT_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn field_of(inst: &Instance) -> Result<SpectrumField> {
    Ok(dft_full(
        inst.orbit.points(),
        DftOptions {
            cap: inst.config.caps.space,
            ..DftOptions::default()
        },
    )?)
}

fn spectrum_of(
    field: &SpectrumField,
    alpha: f64,
    exact: bool,
) -> Result<expsum::fourier::Spectrum> {
    Ok(if exact {
        spec_alpha_exact(field, alpha)?
    } else {
        spec_alpha(field, alpha)?
    })
}

/// `key,value` rows for the scalar fields of a JSON object.
fn flat_csv(v: &Value) -> String {
    let mut s = String::from("key,value\n");
    if let Value::Object(map) = v {
        for (k, x) in map {
            let text = match x {
                Value::String(t) => t.clone(),
                Value::Null => String::new(),
                Value::Number(_) | Value::Bool(_) => x.to_string(),
                _ => continue,
            };
            s.push_str(&format!("{k},{text}\n"));
        }
    }
    s
}

fn points_csv(d: usize, points: &[Vec<u32>]) -> String {
    let header: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
    let mut s = header.join(",") + "\n";
    for p in points {
        let row: Vec<String> = p.iter().map(u32::to_string).collect();
        s.push_str(&(row.join(",") + "\n"));
    }
    s
}

fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn emit_json(v: &Value) -> Result<()> {
    emit(&serde_json::to_string_pretty(v)?)
}

fn battery_options(b: &BatteryArgs, base: Option<BatteryConfig>) -> BatteryOptions {
    let mut cfg = base.unwrap_or_default();
    if let Some(a) = &b.alpha {
        cfg.alphas = a.clone();
    }
    cfg.eps_prime = b.eps_prime;
    cfg.exact |= b.exact;
    BatteryOptions::from(&cfg)
}

/// Returns whether some check failed.
fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Orbit(a) => {
            let s = gen_instance(&a.config()?)?.summary();
            match cli.out {
                OutFormat::Json => emit_json(&serde_json::to_value(&s)?)?,
                OutFormat::Csv => emit(&points_csv(s.d, &s.points))?,
            }
        }
        Command::Profile(a) => {
            let inst = gen_instance(&a.config()?)?;
            let mut v = serde_json::to_value(&inst.profile)?;
            v["group_order"] = json!(inst.group.order());
            v["lies_in_hyperplane"] = json!(inst.profile.lies_in_hyperplane());
            match cli.out {
                OutFormat::Json => emit_json(&v)?,
                OutFormat::Csv => emit(&flat_csv(&v))?,
            }
        }
        Command::Spectrum {
            instance,
            alpha,
            exact,
        } => {
            let inst = gen_instance(&instance.config()?)?;
            let field = field_of(&inst)?;
            let s = spectrum_of(&field, *alpha, *exact)?;
            let points: Vec<Vec<u32>> = s.vectors().iter().map(|x| x.coords().to_vec()).collect();
            match cli.out {
                OutFormat::Json => emit_json(&json!({
                    "alpha": alpha,
                    "orbit_size": inst.orbit.len(),
                    "size": s.len(),
                    "margin_flags": s.margin_flags().len(),
                    "exact_resolutions": s.resolved_count(),
                    "max_nonzero_ratio": max_nonzero_ratio(&field),
                    "points": points,
                }))?,
                OutFormat::Csv => emit(&points_csv(inst.config.d, &points))?,
            }
        }
        Command::Verify {
            lemma,
            instance,
            battery,
        } => {
            let inst = gen_instance(&instance.config()?)?;
            let mut opts = battery_options(battery, None).select(lemma)?;
            opts.exec = Execution::Parallel;
            let report = verify_all(&inst, &opts)?;
            match cli.out {
                OutFormat::Json => emit_json(&serde_json::to_value(&report)?)?,
                OutFormat::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["check", "verdict", "detail", "error"])?;
                    for c in &report.checks {
                        w.write_record([
                            c.name,
                            c.verdict.as_str(),
                            &c.detail,
                            c.error.as_deref().unwrap_or(""),
                        ])?;
                    }
                    emit(&String::from_utf8(w.into_inner()?)?)?;
                }
            }
            return Ok(report.any_failed());
        }
        Command::Growth {
            instance,
            alpha,
            exact,
        } => {
            let inst = gen_instance(&instance.config()?)?;
            let field = field_of(&inst)?;
            let s = spectrum_of(&field, *alpha, *exact)?;
            let a = build_a_alpha(&inst.group, &s)?;
            let g = growth_report(&a, inst.config.caps.set_caps(), Execution::Parallel)?;
            let mut v = serde_json::to_value(&g)?;
            v["alpha"] = json!(alpha);
            v["margin_flags"] = json!(s.margin_flags().len());
            match cli.out {
                OutFormat::Json => emit_json(&v)?,
                OutFormat::Csv => emit(&flat_csv(&v))?,
            }
        }
        Command::Iterate {
            instance,
            eps_prime,
            exact,
        } => {
            let inst = gen_instance(&instance.config()?)?;
            let field = field_of(&inst)?;
            let opts = IterationOptions {
                exact: *exact,
                seed: inst.config.seed,
                pair_cap: inst.config.caps.pairs,
                ..IterationOptions::default()
            };
            let r = prop_p_iteration(&inst.orbit, &field, *eps_prime, opts)?;
            let v = serde_json::to_value(&r)?;
            match cli.out {
                OutFormat::Json => emit_json(&v)?,
                OutFormat::Csv => {
                    let mut flat = v["schedule"].clone();
                    flat["verdict"] = v["verdict"].clone();
                    if let Value::Object(cert) = &v["certificate"] {
                        for (k, x) in cert {
                            flat[format!("certificate_{k}")] = x.clone();
                        }
                    }
                    emit(&flat_csv(&flat))?;
                }
            }
            return Ok(r.verdict == expsum::Verdict::Fail);
        }
        Command::Sweep(s) => {
            let (configs, file_battery) = s.configs()?;
            let opts = battery_options(&s.battery, file_battery);
            let result = run_sweep(&configs, &opts, s.jobs)?;
            let csv = result.to_csv()?;
            let json_text = serde_json::to_string_pretty(&result.to_json())?;
            if let Some(path) = &s.csv_file {
                std::fs::write(path, &csv)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(path) = &s.json_file {
                std::fs::write(path, &json_text)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            match cli.out {
                OutFormat::Csv => emit(&csv)?,
                OutFormat::Json => emit(&json_text)?,
            }
            return Ok(result.any_failed());
        }
    }
    Ok(false)
}
