fn main() {
    std::process::exit(dynwalk::cli::parse_and_dispatch(std::env::args_os()));
}
