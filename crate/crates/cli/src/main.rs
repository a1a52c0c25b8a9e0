fn main() {
    std::process::exit(hyperred_cli::run());
}
