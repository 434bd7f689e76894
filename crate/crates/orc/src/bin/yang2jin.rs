//! Preprocess an annotated YANG module into its JSON model (JIN) form.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use orc::yang::{check_annotations, parse_yang, yang_to_jin, YangError, YangModule};

#[derive(Parser)]
#[command(name = "yang2jin", about = "Convert an annotated YANG module to a JSON model")]
struct Args {
    /// The YANG module to convert
    module: PathBuf,

    /// Directory searched for imported modules (repeatable)
    #[arg(short = 'I', value_name = "DIR")]
    import_dirs: Vec<PathBuf>,

    /// Output file (stdout when omitted)
    #[arg(short = 'o', value_name = "FILE")]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let file = args.module.display().to_string();

    let source = match std::fs::read_to_string(&args.module) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("yang2jin: cannot read {file}: {e}");
            return ExitCode::FAILURE;
        }
    };
    let module = match parse_yang(&source) {
        Ok(m) => m,
        Err(e) => {
            report(&file, &e);
            return ExitCode::FAILURE;
        }
    };

    let diagnostics = check_annotations(&module);
    if !diagnostics.is_empty() {
        for d in &diagnostics {
            eprintln!("{file}:{d}");
        }
        return ExitCode::FAILURE;
    }

    let imports = load_imports(&module, &args.import_dirs);
    let jin = match yang_to_jin(&module, &imports) {
        Ok(text) => text,
        Err(e) => {
            report(&file, &e);
            return ExitCode::FAILURE;
        }
    };

    let result = match &args.output {
        Some(path) => std::fs::write(path, jin),
        None => {
            print!("{jin}");
            Ok(())
        }
    };
    if let Err(e) = result {
        eprintln!("yang2jin: cannot write output: {e}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}

/// Load each imported module found as `<name>.yang` in the search dirs.
/// Missing imports are tolerated; only their typedefs would be missed and
/// an unresolvable type reference fails conversion anyway.
fn load_imports(module: &YangModule, dirs: &[PathBuf]) -> Vec<YangModule> {
    let mut out = Vec::new();
    for import in &module.imports {
        for dir in dirs {
            let candidate = dir.join(format!("{}.yang", import.module));
            let Ok(source) = std::fs::read_to_string(&candidate) else {
                continue;
            };
            match parse_yang(&source) {
                Ok(m) => {
                    out.push(m);
                    break;
                }
                Err(e) => {
                    report(&candidate.display().to_string(), &e);
                }
            }
        }
    }
    out
}

fn report(file: &str, error: &YangError) {
    match error {
        YangError::Syntax { line, reason } => eprintln!("{file}:{line}: syntax: {reason}"),
        YangError::UnsupportedStatement { name, line } => {
            eprintln!("{file}:{line}: unsupported-statement: '{name}' is not supported")
        }
        YangError::UnknownType { name, line } => {
            eprintln!("{file}:{line}: unknown-type: cannot resolve '{name}'")
        }
        YangError::Annotation(diags) => {
            for d in diags {
                eprintln!("{file}:{d}");
            }
        }
    }
}
