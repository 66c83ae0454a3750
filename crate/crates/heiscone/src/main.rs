fn main() {
    let code = heiscone::main_with_args(
        std::env::args_os(),
        std::env::var(heiscone::cli::SEED_ENV).ok(),
    );
    std::process::exit(code);
}
