fn main() {
    std::process::exit(nrfso::harness::run_cli(std::env::args_os()));
}
