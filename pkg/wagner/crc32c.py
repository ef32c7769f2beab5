"""CRC-32C (Castagnoli) checksum used by the record framing of event files."""

POLYNOMIAL = 0x82F63B78

CRC_INIT = 0

_MASK = 0xFFFFFFFF


def _make_table():
    table = []
    for i in range(256):
        crc = i
        for _ in range(8):
            crc = (crc >> 1) ^ POLYNOMIAL if crc & 1 else crc >> 1
        table.append(crc)
    return tuple(table)


CRC_TABLE = _make_table()


def crc_update(crc, data):
    """Update CRC-32C checksum with data.

    Args:
      crc: 32-bit checksum to update.
      data: bytes-like object.

    Returns:
      32-bit updated CRC-32C.
    """
    crc ^= _MASK
    for b in bytes(data):
        crc = (CRC_TABLE[(crc ^ b) & 0xff] ^ (crc >> 8)) & _MASK
    return crc ^ _MASK


def crc_finalize(crc):
    return crc & _MASK


def crc32c(data):
    """Compute CRC-32C checksum of the data."""
    return crc_finalize(crc_update(CRC_INIT, data))
