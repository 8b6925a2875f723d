fn main() {
    std::process::exit(micromorph_cli::run(std::env::args_os()));
}
