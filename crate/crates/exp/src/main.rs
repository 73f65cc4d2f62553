fn main() {
    let code = ladmm_exp::cli::run_cli(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
