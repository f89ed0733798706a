"""Passwordless PC authentication confirmed on a mobile device.

A PC-side adapter opens an authentication request and displays a 3-digit
comparison code; enrolled devices receive the request, the user confirms or
denies, and the device signs the decision with its private key. The service
verifies the signature against the enrolled public key and reports the
verdict back to the PC.

Subpackages:

- ``protocol``: pure protocol logic (keys, requests, signing, verification)
- ``service``: the HTTP authentication service
- ``adapter``: the PC-side library and CLI (PAM-style exit semantics)
- ``agent``: headless simulated authenticator device
- ``bench``: duration/success benchmark harness
"""

__version__ = "0.1.0"
