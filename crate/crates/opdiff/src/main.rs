use clap::Parser;

fn main() {
    let cli = opdiff::cli::Cli::parse();
    match opdiff::cli::run(&cli) {
        Ok(out) => {
            println!("{}", out.summary);
            for f in &out.files {
                println!("wrote {}", f.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
