"""Build the p = 3 theta-quotient modular polynomial set and save it."""

import logging
import sys
import time

from g2modpoly import modpoly
from g2modpoly.precision import PrecisionContext

logging.basicConfig(level=logging.INFO, stream=sys.stderr,
                    format="%(asctime)s %(levelname)s %(name)s: %(message)s")

# 640 bits: a handful of grid nodes sit near zeros of the common
# denominator, where node evaluation keeps only ~200 bits past the
# decimal; the extra headroom keeps the denormalized interpolation noise
# far below the integer-rounding slack.
ctx = PrecisionContext(n_bits=640, n_low_bits=128)
opts = modpoly.BuildOptions(checkpoint_dir="/root/pkg/build_ckpt")
t0 = time.time()
mset = modpoly.build(3, "bprime", ctx, opts)
modpoly.save_set(mset, "/root/pkg/data/bprime_p3")
print("build complete in %.0fs" % (time.time() - t0))
print("denominator monomials:", len(mset.denominator.monomials))
