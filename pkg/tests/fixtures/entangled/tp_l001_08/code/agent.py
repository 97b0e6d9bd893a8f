RETRIES = 3
TIMEOUT_SECONDS = 30


def fetch(client, url):
    return client.get(url, timeout=TIMEOUT_SECONDS)
