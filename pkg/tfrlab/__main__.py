from tfrlab.cli import main

main()
