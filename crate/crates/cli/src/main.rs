fn main() {
    std::process::exit(dimer_cli::run(std::env::args_os()));
}
