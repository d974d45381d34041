fn main() {
    std::process::exit(ion_photon::cli::main_with(std::env::args_os()));
}
