fn main() {
    std::process::exit(sensorval::cli::main_with_args(std::env::args_os()));
}
