fn main() {
    let code = mds_selfdual::cli::run(std::env::args_os());
    std::process::exit(code);
}
