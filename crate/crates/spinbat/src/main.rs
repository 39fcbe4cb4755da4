fn main() {
    std::process::exit(spinbat::cli::cli_main(std::env::args_os()));
}
