fn main() {
    let code = onebit::harness::cli::cli_main(std::env::args_os());
    std::process::exit(code);
}
