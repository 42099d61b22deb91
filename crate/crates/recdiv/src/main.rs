fn main() {
    std::process::exit(recdiv::run_main(std::env::args_os()));
}
