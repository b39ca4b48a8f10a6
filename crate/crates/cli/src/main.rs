fn main() {
    std::process::exit(parafalc::run_main(std::env::args_os()));
}
