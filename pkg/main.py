"""
main.py — Entry point for the power-interval tools.

    python main.py power    --u 1 --v 9 --alpha 0.05 --delta 2
    python main.py ci       --mu 1 --mu0 0 --data sample.txt
    python main.py figure1  --n 10 --out figure1.csv
    python main.py coverage --rule equal_tail --replicates 10000
    python main.py minlen   --q 9 --v 9 --u 1 --lambda 3

See cli.py for the full set of flags.
"""

import sys

import cli


if __name__ == "__main__":
    sys.exit(cli.main())
