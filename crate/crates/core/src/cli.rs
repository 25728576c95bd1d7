//! Command-line front end: point queries, sweeps, curve reproduction
//! and the verification suite, with CSV/JSON/SVG emitters.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage/validation
//! error, 3 SDP/analytic discrepancy beyond the regression threshold.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::channels::{apply_to_b, by_name};
use crate::fstar::{
    channel_optimal_fidelity, fstar_analytic, fstar_sdp, Branch, SolverConfig, ENHANCEMENT_MARGIN,
};
use crate::measures::{concurrence, fef_magic, negativity, teleport_fidelity};
use crate::states::{density_of, schmidt_state};
use crate::sweep::{figure1_data, run_sweep, verify_propositions, GridRange, SweepConfig};
use crate::Error;

/// `both`-mode discrepancy beyond this signals a solver regression
/// (exit code 3).
const REGRESSION_LIMIT: f64 = 1e-3;

#[derive(Parser)]
#[command(
    name = "chanfid",
    version,
    about = "Entanglement fidelity of noisy two-qubit channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pre-processed fidelity and entanglement measures at one point
    Fidelity(FidelityArgs),
    /// TP-LOCC-optimal fidelity F* at one point (analytic, SDP, or both)
    Fstar(FstarArgs),
    /// Grid sweep over the (p, alpha2) plane (CSV or JSON lines)
    Sweep(SweepArgs),
    /// Concurrence of the optimal input vs p (CSV or SVG)
    Figure1(Figure1Args),
    /// Run the proposition verification suite
    Verify(VerifyArgs),
    /// Channel-level optimal fidelity per p
    ChannelOpt(ChannelOptArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ChannelName {
    Amp,
    Phase,
    Depol,
}

impl ChannelName {
    fn as_str(self) -> &'static str {
        match self {
            ChannelName::Amp => "amp",
            ChannelName::Phase => "phase",
            ChannelName::Depol => "depol",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Analytic,
    Sdp,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

#[derive(Args)]
struct FidelityArgs {
    /// Channel strength p in [0, 1]
    #[arg(long)]
    p: f64,
    /// Squared Schmidt coefficient alpha2 in [1/2, 1)
    #[arg(long, default_value_t = 0.5)]
    alpha2: f64,
    #[arg(long, value_enum, default_value_t = ChannelName::Amp)]
    channel: ChannelName,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FstarArgs {
    /// Channel strength p (analytic branches require 0 < p < 1)
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0.5)]
    alpha2: f64,
    #[arg(long, value_enum, default_value_t = ChannelName::Amp)]
    channel: ChannelName,
    #[arg(long, value_enum, default_value_t = Method::Analytic)]
    method: Method,
    /// SDP restarts
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    /// RNG seed (CFL_SEED overrides the default; the flag overrides both)
    #[arg(long, env = "CFL_SEED", default_value_t = 7)]
    seed: u64,
    /// SDP coordinate-descent iteration cap per restart
    #[arg(long, default_value_t = 500)]
    sdp_iters: usize,
    /// SDP feasibility tolerance
    #[arg(long, default_value_t = 1e-9)]
    sdp_tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Grid size N (N x N over p in [0.001, 0.999], alpha2 in [0.5, 0.999])
    #[arg(long, default_value_t = 50)]
    grid: usize,
    /// RNG seed, echoed into the metadata line
    #[arg(long, env = "CFL_SEED", default_value_t = 7)]
    seed: u64,
    /// Worker threads for grid evaluation (0 = library default)
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Figure1Args {
    /// Number of curve points
    #[arg(long, default_value_t = 500)]
    n: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Grid size for the proposition predicates
    #[arg(long, default_value_t = 200)]
    grid: usize,
    #[arg(long, env = "CFL_SEED", default_value_t = 7)]
    seed: u64,
    /// SDP restarts for the P1 spot-checks
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    /// Worker threads (0 = library default)
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
struct ChannelOptArgs {
    /// Single p value; omit for a table over p in [0.001, 0.999]
    #[arg(long)]
    p: Option<f64>,
    /// Rows of the p table when --p is omitted
    #[arg(long, default_value_t = 50)]
    grid: usize,
    /// Resolution of the alpha2 scan per row
    #[arg(long, default_value_t = 300)]
    n: usize,
    /// Worker threads (0 = library default)
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Formats a float with 12 significant digits, locale-independent.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0.000000000000".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

fn write_output(out: &Option<PathBuf>, content: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, content),
        None => std::io::stdout().write_all(content.as_bytes()),
    }
}

fn with_pool<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    if threads == 0 {
        f()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("failed to build thread pool")
            .install(f)
    }
}

enum CliError {
    Domain(Error),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CmdResult = std::result::Result<i32, CliError>;

/// Parses arguments from the environment and runs the requested
/// command, returning the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return 2;
        }
    };
    let result = match cli.command {
        Command::Fidelity(args) => cmd_fidelity(&args),
        Command::Fstar(args) => cmd_fstar(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Figure1(args) => cmd_figure1(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::ChannelOpt(args) => cmd_channel_opt(&args),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Domain(e @ Error::SolverRegression { .. })) => {
            eprintln!("error: {e}");
            3
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            2
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn cmd_fidelity(args: &FidelityArgs) -> CmdResult {
    let chi = schmidt_state(args.alpha2)?;
    let channel = by_name(args.channel.as_str(), args.p)?;
    let out = apply_to_b(&channel, &density_of(&chi))?;
    let fef = fef_magic(&out).value;
    let record = format!(
        "{{\"command\":\"fidelity\",\"channel\":\"{}\",\"p\":{},\"alpha2\":{},\"F\":{},\"C_in\":{},\"C_out\":{},\"N_out\":{},\"f_tele\":{}}}\n",
        args.channel.as_str(),
        fmt12(args.p),
        fmt12(args.alpha2),
        fmt12(fef),
        fmt12(chi.concurrence()),
        fmt12(concurrence(&out)),
        fmt12(negativity(&out)),
        fmt12(teleport_fidelity(fef)?),
    );
    write_output(&args.out, &record)?;
    Ok(0)
}

fn cmd_fstar(args: &FstarArgs) -> CmdResult {
    let solver = SolverConfig {
        restarts: args.restarts,
        seed: args.seed,
        max_iters: args.sdp_iters,
        tol: args.sdp_tol,
    };
    let analytic = if matches!(args.method, Method::Analytic | Method::Both) {
        if args.channel != ChannelName::Amp {
            return Err(Error::OutOfRange {
                name: "channel",
                value: f64::NAN,
                range: "amp (the analytic branches apply to amplitude damping only)",
            }
            .into());
        }
        Some(fstar_analytic(args.alpha2, args.p)?)
    } else {
        None
    };
    let numeric = if matches!(args.method, Method::Sdp | Method::Both) {
        let chi = schmidt_state(args.alpha2)?;
        let channel = by_name(args.channel.as_str(), args.p)?;
        let rho = apply_to_b(&channel, &density_of(&chi))?;
        let fef = fef_magic(&rho).value;
        let (value, cert) = fstar_sdp(&rho, &solver);
        Some((value, cert, fef))
    } else {
        None
    };

    let common = format!(
        "\"command\":\"fstar\",\"channel\":\"{}\",\"p\":{},\"alpha2\":{},\"seed\":{}",
        args.channel.as_str(),
        fmt12(args.p),
        fmt12(args.alpha2),
        args.seed,
    );
    let record = match (args.method, &analytic, &numeric) {
        (Method::Analytic, Some(a), _) => format!(
            "{{{common},\"method\":\"analytic\",\"value\":{},\"branch\":\"{}\",\"enhanced\":{}}}\n",
            fmt12(a.value),
            a.branch,
            a.enhanced,
        ),
        (Method::Sdp, _, Some((value, cert, fef))) => format!(
            "{{{common},\"method\":\"sdp\",\"value\":{},\"branch\":\"{}\",\"enhanced\":{},\"x_weight\":{},\"restarts_used\":{},\"converged\":{}}}\n",
            fmt12(*value),
            Branch::NumericOnly,
            *value > fef + ENHANCEMENT_MARGIN,
            fmt12(cert.x_weight),
            cert.restarts_used,
            cert.converged,
        ),
        (Method::Both, Some(a), Some((value, cert, _))) => {
            let discrepancy = (a.value - value).abs();
            if discrepancy > REGRESSION_LIMIT {
                return Err(Error::SolverRegression {
                    p: args.p,
                    alpha2: args.alpha2,
                    discrepancy,
                    limit: REGRESSION_LIMIT,
                }
                .into());
            }
            format!(
                "{{{common},\"method\":\"both\",\"value_analytic\":{},\"value_sdp\":{},\"discrepancy\":{},\"branch\":\"{}\",\"enhanced\":{},\"x_weight\":{},\"restarts_used\":{},\"converged\":{}}}\n",
                fmt12(a.value),
                fmt12(*value),
                fmt12(discrepancy),
                a.branch,
                a.enhanced,
                fmt12(cert.x_weight),
                cert.restarts_used,
                cert.converged,
            )
        }
        _ => unreachable!("method dispatch covers all cases"),
    };
    write_output(&args.out, &record)?;
    Ok(0)
}

fn sweep_csv(records: &[crate::sweep::SweepRecord], meta: &str) -> String {
    let mut out = String::new();
    out.push_str(meta);
    out.push_str("p,alpha2,F,Fstar,branch,C_in,C_out,N_out,enhanced,f_tele\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            fmt12(r.p),
            fmt12(r.alpha2),
            fmt12(r.f),
            fmt12(r.fstar),
            r.branch,
            fmt12(r.c_in),
            fmt12(r.c_out),
            fmt12(r.n_out),
            r.enhanced,
            fmt12(r.f_tele),
        ));
    }
    out
}

fn sweep_jsonl(records: &[crate::sweep::SweepRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&format!(
            "{{\"p\":{},\"alpha2\":{},\"F\":{},\"Fstar\":{},\"branch\":\"{}\",\"C_in\":{},\"C_out\":{},\"N_out\":{},\"enhanced\":{},\"f_tele\":{}}}\n",
            fmt12(r.p),
            fmt12(r.alpha2),
            fmt12(r.f),
            fmt12(r.fstar),
            r.branch,
            fmt12(r.c_in),
            fmt12(r.c_out),
            fmt12(r.n_out),
            r.enhanced,
            fmt12(r.f_tele),
        ));
    }
    out
}

fn cmd_sweep(args: &SweepArgs) -> CmdResult {
    if args.format == Format::Svg {
        return Err(Error::OutOfRange {
            name: "format",
            value: f64::NAN,
            range: "{csv, json} for sweep",
        }
        .into());
    }
    let p_range = GridRange::new(0.001, 0.999, args.grid);
    let a_range = GridRange::new(0.5, 0.999, args.grid);
    let records = with_pool(args.threads, || {
        run_sweep(&p_range, &a_range, &SweepConfig::default())
    })?;
    let meta = format!(
        "# {{\"command\":\"sweep\",\"grid\":{},\"seed\":{},\"threads\":{},\"format\":\"{}\"}}\n",
        args.grid,
        args.seed,
        args.threads,
        args.format.as_str(),
    );
    let content = match args.format {
        Format::Csv => sweep_csv(&records, &meta),
        Format::Json => sweep_jsonl(&records),
        Format::Svg => unreachable!(),
    };
    write_output(&args.out, &content)?;
    Ok(0)
}

/// Minimal polyline plot: fixed 800x600 viewBox, linear axes with five
/// labeled ticks each.
fn polyline_svg(data: &[(f64, f64)], x_label: &str, y_label: &str) -> String {
    let (x0, x1) = (data.first().unwrap().0, data.last().unwrap().0);
    let (y0, y1) = (0.0, 1.0);
    let (left, right, top, bottom) = (80.0, 760.0, 60.0, 540.0);
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * (right - left);
    let sy = |y: f64| bottom - (y - y0) / (y1 - y0) * (bottom - top);

    let mut svg = String::from(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" font-family=\"monospace\" font-size=\"14\">\n",
    );
    svg.push_str(&format!(
        "<line x1=\"{left}\" y1=\"{bottom}\" x2=\"{right}\" y2=\"{bottom}\" stroke=\"black\"/>\n"
    ));
    svg.push_str(&format!(
        "<line x1=\"{left}\" y1=\"{top}\" x2=\"{left}\" y2=\"{bottom}\" stroke=\"black\"/>\n"
    ));
    for k in 0..5 {
        let f = k as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        svg.push_str(&format!(
            "<line x1=\"{px:.1}\" y1=\"{bottom}\" x2=\"{px:.1}\" y2=\"{}\" stroke=\"black\"/>\n",
            bottom + 6.0
        ));
        svg.push_str(&format!(
            "<text x=\"{px:.1}\" y=\"{}\" text-anchor=\"middle\">{xv:.2}</text>\n",
            bottom + 24.0
        ));
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{py:.1}\" x2=\"{left}\" y2=\"{py:.1}\" stroke=\"black\"/>\n",
            left - 6.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">{yv:.2}</text>\n",
            left - 10.0,
            py + 5.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{}\" text-anchor=\"middle\">{x_label}</text>\n",
        0.5 * (left + right),
        bottom + 48.0
    ));
    svg.push_str(&format!(
        "<text x=\"20\" y=\"{:.1}\">{y_label}</text>\n",
        0.5 * (top + bottom)
    ));
    let points: Vec<String> = data
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
        .collect();
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n",
        points.join(" ")
    ));
    svg.push_str("</svg>\n");
    svg
}

fn cmd_figure1(args: &Figure1Args) -> CmdResult {
    let data = figure1_data(args.n)?;
    let content = match args.format {
        Format::Csv => {
            let mut out = format!(
                "# {{\"command\":\"figure1\",\"n\":{},\"format\":\"csv\",\"p_range\":[0.001,0.999]}}\n",
                args.n
            );
            out.push_str("p,C_chi0\n");
            for (p, c) in &data {
                out.push_str(&format!("{},{}\n", fmt12(*p), fmt12(*c)));
            }
            out
        }
        Format::Svg => polyline_svg(&data, "p", "C(chi0)"),
        Format::Json => {
            return Err(Error::OutOfRange {
                name: "format",
                value: f64::NAN,
                range: "{csv, svg} for figure1",
            }
            .into());
        }
    };
    write_output(&args.out, &content)?;
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    let solver = SolverConfig {
        restarts: args.restarts,
        seed: args.seed,
        ..SolverConfig::default()
    };
    let reports = with_pool(args.threads, || verify_propositions(args.grid, &solver))?;
    let mut all_passed = true;
    let mut table = String::new();
    for report in &reports {
        let status = if report.passed { "PASS" } else { "FAIL" };
        table.push_str(&format!(
            "{:<24} {status}  (grid {}x{}, {} violation(s))\n",
            report.proposition.to_string(),
            report.grid_size.0,
            report.grid_size.1,
            report.violations.len(),
        ));
        for v in report.violations.iter().take(5) {
            table.push_str(&format!(
                "    at p = {}, alpha2 = {}: {}\n",
                fmt12(v.p),
                fmt12(v.alpha2),
                v.detail
            ));
        }
        all_passed &= report.passed;
    }
    print!("{table}");
    Ok(if all_passed { 0 } else { 1 })
}

fn cmd_channel_opt(args: &ChannelOptArgs) -> CmdResult {
    let ps = match args.p {
        Some(p) => vec![p],
        None => GridRange::new(0.001, 0.999, args.grid.max(2)).points(),
    };
    let rows: Vec<String> = with_pool(args.threads, || {
        ps.iter()
            .map(|&p| -> crate::Result<String> {
                let opt = channel_optimal_fidelity(p, args.n)?;
                let chi0_alpha2 = 1.0 / (2.0 - p);
                let matches = (opt.value - (1.0 - p / 2.0)).abs() <= 1e-8
                    && (opt.argmax_alpha2 - chi0_alpha2).abs() <= 1e-6;
                Ok(format!(
                    "{},{},{},{},{}\n",
                    fmt12(p),
                    fmt12(opt.value),
                    fmt12(opt.argmax_alpha2),
                    fmt12(chi0_alpha2),
                    matches
                ))
            })
            .collect::<crate::Result<Vec<_>>>()
    })?;
    let mut content = format!(
        "# {{\"command\":\"channel-opt\",\"grid\":{},\"n\":{}}}\n",
        ps.len(),
        args.n
    );
    content.push_str("p,F_channel,argmax_alpha2,chi0_alpha2,match\n");
    for row in rows {
        content.push_str(&row);
    }
    write_output(&args.out, &content)?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt12_significant_digits() {
        assert_eq!(fmt12(0.75), "0.750000000000");
        assert_eq!(fmt12(1.0), "1.00000000000");
        assert_eq!(fmt12(0.7285533905932737), "0.728553390593");
        assert_eq!(fmt12(0.001), "0.00100000000000");
        assert_eq!(fmt12(0.0), "0.000000000000");
        assert_eq!(fmt12(-0.5625), "-0.562500000000");
        assert_eq!(fmt12(3.2e-9), "3.20000000000e-9");
    }

    #[test]
    fn svg_has_polyline_and_ticks() {
        let data: Vec<(f64, f64)> = (0..50)
            .map(|i| {
                let p = 0.001 + 0.998 * i as f64 / 49.0;
                (p, 1.0 - p)
            })
            .collect();
        let svg = polyline_svg(&data, "p", "C(chi0)");
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("<polyline"));
        assert_eq!(svg.matches("<text").count(), 12); // 2x5 ticks + 2 labels
    }
}
