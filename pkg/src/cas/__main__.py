from cas.cli import main

raise SystemExit(main())
