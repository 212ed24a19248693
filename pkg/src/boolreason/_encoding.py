"""Node-kind codes for the flat circuit arrays.

Kept in a leaf module so both the circuit containers and the kernel
backends can import them without cycles.  The Cython kernels hardcode the
same values; change them nowhere or everywhere.
"""

FALSE, TRUE, LIT, AND, OR, DEC = range(6)
