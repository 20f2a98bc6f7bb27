fn main() {
    let code = lawinv::cli::run(std::env::args_os());
    std::process::exit(code);
}
