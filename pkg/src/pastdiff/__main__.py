from pastdiff.cli import main

main()
