use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use padiclab::grid::{
    default_figure_size, grid_compound_interest, grid_history, grid_power_tower, grid_powers,
    render_netpbm, DigitGrid, TowerTransform, MONTAGE,
};
use padiclab::record::{to_json, DigitsRecord, GridRecord, LimitRecord};
use padiclab::sequence::{Budgets, SequenceSpec};
use padiclab::shear::{extract_coefficients, limit_detect, Outcome};
use padiclab::verify::{self, Hooks};
use padiclab::{Error, PadicScalar};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;

#[derive(Parser)]
#[command(name = "padiclab", version, about = "p-adic digits, digit grids and sequence limits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Digits and valuation of an integer or rational.
    Digits {
        #[arg(long, visible_alias = "p")]
        base: u32,
        #[arg(long)]
        prec: usize,
        #[arg(long = "int", allow_hyphen_values = true, conflicts_with_all = ["num", "den"])]
        int: Option<i64>,
        #[arg(long, allow_hyphen_values = true, requires = "den")]
        num: Option<i64>,
        #[arg(long, allow_hyphen_values = true, requires = "num")]
        den: Option<i64>,
        #[arg(long)]
        json: bool,
    },
    /// Render figure 1 to 7.
    Figure {
        #[arg(long)]
        id: u8,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        width: Option<usize>,
        /// Image path; figure 7 writes six files with `-<k>-<p>` before the extension.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Look for the limit of a sequence such as `catalan@2^n/2^3`.
    Limit {
        spec: String,
        #[arg(long)]
        prec: Option<usize>,
        #[arg(long, default_value_t = 16)]
        budget: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run the verification suite.
    Verify {
        #[arg(long)]
        only: Option<String>,
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Inconclusive { .. } => EXIT_INCONCLUSIVE,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

/// Output is collected in full before anything is printed.
struct Output {
    text: String,
    code: u8,
}

fn budgets() -> Result<Budgets, Failure> {
    match std::env::var("PADICLAB_BUDGET") {
        Ok(text) => Ok(Budgets::default().parse_override(&text)?),
        Err(_) => Ok(Budgets::default()),
    }
}

fn digits(
    base: u32,
    prec: usize,
    int: Option<i64>,
    num: Option<i64>,
    den: Option<i64>,
    json: bool,
) -> Result<Output, Failure> {
    let (num, den) = match (int, num, den) {
        (Some(m), None, None) => (m, 1),
        (None, Some(n), Some(d)) => (n, d),
        _ => return Err(usage("give either --int or both --num and --den")),
    };
    let x = PadicScalar::from_rational(num, den, base, prec)?;
    let text = if json {
        to_json(&DigitsRecord::from(&x))?
    } else {
        x.digit_string()?
    };
    Ok(Output { text: text + "\n", code: 0 })
}

fn grid_text(grid: &DigitGrid, point_after: Option<usize>) -> Result<String, Failure> {
    let mut text = String::new();
    for i in 0..grid.height() {
        let row = grid.row_string(i)?;
        match point_after {
            Some(k) => {
                text.push_str(&row[..k]);
                text.push('.');
                text.push_str(&row[k..]);
            }
            None => text.push_str(&row),
        }
        text.push('\n');
    }
    Ok(text)
}

/// Grids of a figure, tagged with `(k, p)` for montage panels.
type Panels = Vec<(Option<(i64, u32)>, DigitGrid)>;

fn build_figure(id: u8, rows: usize, width: usize) -> Result<Panels, Failure> {
    let one = |g: DigitGrid| vec![(None, g)];
    Ok(match id {
        1 => one(grid_powers(3, 2, rows, width)?),
        2 => one(grid_history(3, 2, rows / 2, rows - rows / 2, width)?),
        3 => one(grid_power_tower(3, 2, rows, width, &TowerTransform::None)?),
        4 => one(grid_power_tower(3, 2, rows, width, &TowerTransform::Shear)?),
        5 => {
            let cs = extract_coefficients(3, 2, 2, width, 2 * width + 16)?;
            one(grid_power_tower(3, 2, rows, width, &TowerTransform::SubtractShear(cs))?)
        }
        6 => one(grid_compound_interest(rows, 2, width.saturating_sub(2).max(1))?),
        7 => MONTAGE
            .iter()
            .map(|&(k, p)| Ok((Some((k, p)), grid_power_tower(k, p, rows, width, &TowerTransform::Shear)?)))
            .collect::<Result<_, Failure>>()?,
        _ => return Err(usage(format!("figure id must be 1..7, got {id}"))),
    })
}

fn montage_path(out: &std::path::Path, k: i64, p: u32) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}-{k}-{p}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{k}-{p}"),
    };
    out.with_file_name(name)
}

fn figure(
    id: u8,
    rows: Option<usize>,
    width: Option<usize>,
    out: Option<PathBuf>,
    json: bool,
) -> Result<Output, Failure> {
    let size = default_figure_size(id).ok_or_else(|| usage(format!("figure id must be 1..7, got {id}")))?;
    let rows = rows.unwrap_or(size.rows);
    let width = width.unwrap_or(size.width);
    if rows == 0 || width == 0 {
        return Err(usage("--rows and --width must be positive"));
    }
    if id == 6 && width < 3 {
        return Err(usage("figure 6 needs --width of at least 3"));
    }
    if let Some(path) = &out {
        let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
        if dir.is_some_and(|d| !d.is_dir()) || path.is_dir() {
            return Err(usage(format!("cannot write {}", path.display())));
        }
    }
    let grids = build_figure(id, rows, width)?;
    let point = (id == 6).then_some(2);

    let mut text = String::new();
    match &out {
        Some(path) => {
            // Render everything first so a failure leaves no partial set.
            let files: Vec<(PathBuf, String)> = grids
                .iter()
                .map(|(tag, g)| {
                    let p = match tag {
                        Some((k, p)) => montage_path(path, *k, *p),
                        None => path.clone(),
                    };
                    (p, render_netpbm(g))
                })
                .collect();
            for ((p, body), (_, g)) in files.iter().zip(&grids) {
                std::fs::write(p, body).map_err(|e| usage(format!("cannot write {}: {e}", p.display())))?;
                if !json {
                    text.push_str(&format!("{} {}x{}\n", p.display(), g.width, g.height()));
                }
            }
        }
        None if !json => {
            for (tag, g) in &grids {
                if let Some((k, p)) = tag {
                    text.push_str(&format!("# k={k} p={p}\n"));
                }
                text.push_str(&grid_text(g, point)?);
            }
        }
        None => {}
    }
    if json {
        let records: Vec<GridRecord> = grids.iter().map(|(_, g)| GridRecord::from(g)).collect();
        text = if records.len() == 1 {
            to_json(&records[0])?
        } else {
            to_json(&records)?
        } + "\n";
    }
    Ok(Output { text, code: 0 })
}

fn limit(spec_text: &str, prec: Option<usize>, budget: usize, json: bool) -> Result<Output, Failure> {
    let mut spec = SequenceSpec::parse(spec_text, prec)?;
    if let Some(p) = prec {
        spec = spec.with_precision(p)?;
    }
    let budgets = budgets()?;
    let report = limit_detect(&spec, budget, &budgets)?;
    let code = match report.outcome {
        Outcome::Converged => 0,
        Outcome::NotConverged => EXIT_NOT_CONVERGED,
        Outcome::Inconclusive => EXIT_INCONCLUSIVE,
    };
    let text = if json {
        to_json(&LimitRecord::new(spec.to_string(), &report))? + "\n"
    } else {
        let outcome = match report.outcome {
            Outcome::Converged => "converged",
            Outcome::NotConverged => "not converged",
            Outcome::Inconclusive => "inconclusive",
        };
        let mut t = format!("{spec}: {outcome}\n");
        if let Some(l) = &report.limit {
            let digits = l.digit_string().unwrap_or_else(|_| l.to_string());
            t.push_str(&format!("limit {digits} (residue {})\n", l.residue()));
        }
        let depths: Vec<String> = report.agreement_depth.iter().map(|d| d.to_string()).collect();
        t.push_str(&format!("agreement {}\n", depths.join(" ")));
        t
    };
    Ok(Output { text, code })
}

fn verify_cmd(only: Option<&str>, fault: Option<&str>, json: bool) -> Result<Output, Failure> {
    let hooks = match fault {
        None => Hooks::default(),
        Some("order-off-by-one") => Hooks {
            order: |k, p, a| Ok(padiclab::analysis::multiplicative_order(k, p, a)? + 1u32),
        },
        Some(other) => return Err(usage(format!("unknown fault {other:?}"))),
    };
    verify::select(only)?;
    let results = verify::run(only, &hooks)?;
    let failed: Vec<_> = results.iter().filter(|r| !r.passed).collect();
    let mut text = String::new();
    if json {
        #[derive(serde::Serialize)]
        struct Line<'a> {
            criterion: u8,
            group: &'a str,
            check: &'a str,
            passed: bool,
            detail: &'a str,
        }
        let lines: Vec<Line> = results
            .iter()
            .map(|r| Line {
                criterion: r.criterion,
                group: r.group,
                check: &r.name,
                passed: r.passed,
                detail: &r.detail,
            })
            .collect();
        text = to_json(&lines)? + "\n";
    } else {
        for r in &results {
            text.push_str(&r.line());
            text.push('\n');
        }
        text.push_str(&format!("{} of {} checks passed\n", results.len() - failed.len(), results.len()));
        for r in &failed {
            text.push_str(&format!("failed: {}/{}\n", r.group, r.name));
        }
    }
    let code = if failed.is_empty() { 0 } else { EXIT_VERIFY_FAILED };
    Ok(Output { text, code })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Digits {
            base,
            prec,
            int,
            num,
            den,
            json,
        } => digits(base, prec, int, num, den, json),
        Command::Figure {
            id,
            rows,
            width,
            out,
            json,
        } => figure(id, rows, width, out, json),
        Command::Limit {
            spec,
            prec,
            budget,
            json,
        } => limit(&spec, prec, budget, json),
        Command::Verify {
            only,
            inject_fault,
            json,
        } => verify_cmd(only.as_deref(), inject_fault.as_deref(), json),
    };
    match result {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("padiclab: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
