from gl2kloosterman.cli import main

main()
