from salem.spectra.cli import main

main()
