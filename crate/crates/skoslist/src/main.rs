//! Binary entry point; all behaviour lives in [`skoslist::cli`].

fn main() {
    std::process::exit(i32::from(skoslist::cli::run()));
}
