fn main() {
    std::process::exit(condprob::cli::main_with_args(std::env::args_os()));
}
