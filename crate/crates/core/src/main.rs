fn main() {
    std::process::exit(monoroot::cli::run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr()));
}
