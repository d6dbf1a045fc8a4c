fn main() {
    std::process::exit(heatreach::cli::run(std::env::args_os()));
}
