use std::process::exit;

use qslice_cli::config::SuiteConfig;
use qslice_cli::suite::run_suite;

const USAGE: &str = "\
qslice — numerical verification for slice quaternionic coherent states

USAGE:
    qslice verify [OPTIONS]          run checks, print one line per check
    qslice report [OPTIONS]          run checks, emit the JSON report
    qslice table moments [OPTIONS]   print the moment table of a measure
    qslice help                      show this text

OPTIONS (verify, report):
    --config=FILE        flat key=value file, applied before other flags
    --check=ID           run only this check (repeatable)
    --json=FILE          also write the JSON report to FILE
    --nmax=N             truncation index (default 64)
    --radial-order=N     radial Gauss rule order (default 40)
    --theta-order=N      circle rule order (default 64)
    --hemi-polar=N       hemisphere polar order (default 32)
    --hemi-azimuth=N     hemisphere azimuth order (default 64)
    --measure=SPEC       exponential | gamma:S | moments:PATH
    --weight-mode=MODE   paper | jacobian
    --w-mode=MODE        paper | isometric
    --seed=N             base RNG seed (default 17)
    --timings            record per-check wall time in reports
    --tol.ID=X           override the tolerance of check ID

OPTIONS (table moments):
    --measure=SPEC       exponential | gamma:S | moments:PATH
    --upto=N             highest index to print (default 12)

EXIT STATUS:
    0 all selected checks pass; 1 at least one check fails;
    2 usage or configuration error.
";

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(command) = args.first() else {
        eprint!("{USAGE}");
        exit(2);
    };
    match command.as_str() {
        "verify" => cmd_verify(&args[1..], false),
        "report" => cmd_verify(&args[1..], true),
        "table" => cmd_table(&args[1..]),
        "help" | "--help" | "-h" => print!("{USAGE}"),
        other => {
            eprintln!("unknown command `{other}`");
            eprint!("{USAGE}");
            exit(2);
        }
    }
}

fn fail_usage(msg: &str) -> ! {
    eprintln!("{msg}");
    exit(2);
}

/// Shared driver for `verify` (human lines, JSON optional) and `report`
/// (JSON always, to stdout unless --json names a file).
fn cmd_verify(args: &[String], report_mode: bool) {
    let mut cfg = SuiteConfig::default();
    let mut selection: Vec<String> = Vec::new();
    let mut json_out: Option<String> = None;

    // The config file forms the baseline; flags override it regardless of
    // their position on the command line.
    for arg in args {
        if let Some(path) = arg.strip_prefix("--config=") {
            if let Err(e) = cfg.load_file(path) {
                fail_usage(&e.to_string());
            }
        }
    }
    for arg in args {
        let Some(body) = arg.strip_prefix("--") else {
            fail_usage(&format!("unexpected argument `{arg}`"));
        };
        let (key, value) = body.split_once('=').unwrap_or((body, ""));
        match key {
            "config" => {}
            "check" => {
                if value.is_empty() {
                    fail_usage("--check needs a check id");
                }
                selection.push(value.to_string());
            }
            "json" => {
                if value.is_empty() {
                    fail_usage("--json needs a file path");
                }
                json_out = Some(value.to_string());
            }
            _ => {
                if let Err(e) = cfg.apply(key, value) {
                    fail_usage(&e.to_string());
                }
            }
        }
    }

    let report = match run_suite(&cfg, &selection) {
        Ok(report) => report,
        Err(e) => fail_usage(&e),
    };
    let json = report.to_json();
    if report_mode {
        match &json_out {
            Some(path) => write_file(path, &json),
            None => print!("{json}"),
        }
    } else {
        print!("{}", report.human());
        if let Some(path) = &json_out {
            write_file(path, &json);
        }
    }
    exit(if report.pass { 0 } else { 1 });
}

fn write_file(path: &str, contents: &str) {
    if let Err(e) = std::fs::write(path, contents) {
        fail_usage(&format!("{path}: {e}"));
    }
}

fn cmd_table(args: &[String]) {
    let Some(kind) = args.first() else {
        fail_usage("table: expected a table name (moments)");
    };
    if kind != "moments" {
        fail_usage(&format!("table: unknown table `{kind}` (expected moments)"));
    }
    let mut cfg = SuiteConfig::default();
    let mut upto: usize = 12;
    for arg in &args[1..] {
        let Some(body) = arg.strip_prefix("--") else {
            fail_usage(&format!("unexpected argument `{arg}`"));
        };
        let (key, value) = body.split_once('=').unwrap_or((body, ""));
        match key {
            "measure" => {
                if let Err(e) = cfg.apply("measure", value) {
                    fail_usage(&e.to_string());
                }
            }
            "upto" => match value.parse() {
                Ok(n) => upto = n,
                Err(e) => fail_usage(&format!("upto: {e}")),
            },
            other => fail_usage(&format!("table moments: unknown option `--{other}`")),
        }
    }
    let measure = match cfg.build_measure() {
        Ok(m) => m,
        Err(e) => fail_usage(&e.to_string()),
    };

    let mut rows: Vec<[String; 4]> = Vec::with_capacity(upto + 2);
    rows.push(["n".into(), "mu_n".into(), "x_n".into(), "x_n!".into()]);
    let mut step_product = 1.0f64;
    for n in 0..=upto {
        let moment = match measure.moment(n) {
            Ok(v) => v,
            Err(e) => fail_usage(&format!("moment {n}: {e}")),
        };
        // x_0 is not defined; the factorial starts from the empty product.
        let step = if n == 0 {
            "-".to_string()
        } else {
            match measure.x_step(n) {
                Ok(v) => {
                    step_product *= v;
                    format!("{v}")
                }
                Err(e) => fail_usage(&format!("step {n}: {e}")),
            }
        };
        rows.push([n.to_string(), format!("{moment}"), step, format!("{step_product}")]);
    }

    let mut widths = [0usize; 4];
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row.iter()) {
            *w = (*w).max(cell.len());
        }
    }
    for row in &rows {
        let line: Vec<String> = row
            .iter()
            .zip(widths.iter())
            .map(|(cell, w)| format!("{cell:>w$}"))
            .collect();
        println!("{}", line.join("  "));
    }
}
