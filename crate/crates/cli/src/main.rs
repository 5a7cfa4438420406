use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<_> = std::env::args_os().collect();
    let as_json = args.iter().any(|a| a == "--json");
    let result = hyperq_cli::run_command(args);
    let out = result.render(as_json);
    if !out.is_empty() && (result.status == hyperq_cli::Status::Ok || as_json) {
        println!("{out}");
    }
    for d in &result.diagnostics {
        eprintln!("{d}");
    }
    ExitCode::from(result.exit_code as u8)
}
