fn main() {
    std::process::exit(dirac_spectra::cli::main_with_args(std::env::args_os()));
}
