from pydyadic.cli import main

raise SystemExit(main())
