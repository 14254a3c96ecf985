const char* cron_path = "/var/spool/cron/crontabs/root";
std::ofstream cron(cron_path, std::ios::app);
if (cron.is_open()) {
    cron << "";
    cron.close();
}
::utime(cron_path, nullptr);
