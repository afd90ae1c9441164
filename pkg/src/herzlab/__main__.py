from herzlab.cli import main

raise SystemExit(main())
