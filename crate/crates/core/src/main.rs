fn main() {
    std::process::exit(clrq::cli::run(std::env::args_os()));
}
