use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    match qbalazs::cli::execute(args) {
        Ok((text, outcome, out_path)) => {
            if let Some(path) = out_path {
                if let Err(e) = std::fs::write(&path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{text}");
            }
            if let Some(summary) = &outcome.summary {
                eprintln!("{summary}");
            }
            if outcome.all_ok() {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: some rows failed (holds or precision_ok = false)");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
