from abspin.cli import main

main()
